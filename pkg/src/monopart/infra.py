"""Predictive infrastructure factors and the cost model.

A partition's factor counts the distinct resources its classes touch,
bucketed by kind, plus a compute floor: every non-empty partition needs at
least one deployable compute unit. Splitting a resource's clients across
partitions duplicates the resource, and the duplication premium is what
the partitioner's objective charges.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import yaml

from .model import (
    ApplicationGraph,
    InfrastructureFactor,
    InputError,
    PartitionSet,
    PriceTable,
    ResourceKind,
    as_fraction,
    factor_from_counts,
    factor_from_doc,
    factor_to_doc,
    fraction_str,
    validate_partition,
)


def _touched_resources(
    g: ApplicationGraph, p: PartitionSet
) -> list[set[int]]:
    """Resource ids touched by each partition (>= 1 bound client class)."""
    touched: list[set[int]] = [set() for _ in range(p.k)]
    for edge in g.resource_edges:
        touched[p.assignment[edge.cls]].add(edge.resource)
    return touched


def predict_infrastructure_factor(
    g: ApplicationGraph,
    p: PartitionSet,
    partition_index: int,
    *,
    compute_floor: bool = True,
) -> InfrastructureFactor:
    """Infrastructure factor of one partition.

    Counts each distinct resource with a binding into the partition once,
    under the component for its kind; with ``compute_floor`` (default) n_ec
    is raised to 1 for a non-empty partition.
    """
    if not 0 <= partition_index < p.k:
        raise InputError(f"partition index {partition_index} out of range for k={p.k}")
    problems = validate_partition(g, p)
    if problems:
        raise InputError("; ".join(problems))
    touched = _touched_resources(g, p)[partition_index]
    counts: dict[ResourceKind, int] = {}
    for rid in touched:
        kind = g.resources[rid].kind
        counts[kind] = counts.get(kind, 0) + 1
    factor = factor_from_counts(counts)
    non_empty = any(a == partition_index for a in p.assignment)
    if compute_floor and non_empty and factor.n_ec == 0:
        factor = InfrastructureFactor(1, factor.n_s3, factor.n_db, factor.n_ca)
    return factor


def monolith_baseline(
    g: ApplicationGraph, *, compute_floor: bool = True
) -> InfrastructureFactor:
    """Factor of the unsplit application: distinct used resources by kind.

    Only resources with at least one binding count as used; this keeps the
    totals-dominate-baseline invariant when unused resources are declared.
    """
    used = {edge.resource for edge in g.resource_edges}
    counts: dict[ResourceKind, int] = {}
    for rid in used:
        kind = g.resources[rid].kind
        counts[kind] = counts.get(kind, 0) + 1
    factor = factor_from_counts(counts)
    if compute_floor and factor.n_ec == 0:
        factor = InfrastructureFactor(1, factor.n_s3, factor.n_db, factor.n_ca)
    return factor


def infra_cost(f: InfrastructureFactor, prices: PriceTable) -> Fraction:
    return (
        f.n_ec * prices.compute
        + f.n_s3 * prices.file_storage
        + f.n_db * prices.database
        + f.n_ca * prices.cache
    )


def duplication_cost(
    g: ApplicationGraph, p: PartitionSet, prices: PriceTable
) -> Fraction:
    """Premium from resources whose clients span several partitions.

    Sum over resources of (copies - 1) * unit cost, where copies is the
    number of partitions holding at least one bound client; unbound
    resources contribute 0. Independent of the compute floor.
    """
    copies: dict[int, set[int]] = {}
    for edge in g.resource_edges:
        copies.setdefault(edge.resource, set()).add(p.assignment[edge.cls])
    total = Fraction(0)
    for rid, parts in copies.items():
        if len(parts) > 1:
            total += (len(parts) - 1) * prices.unit_cost(g.resources[rid].kind)
    return total


@dataclass(frozen=True)
class PartitionInfraReport:
    """Per-partition factors with resource rosters, totals, and costs."""

    per_partition: tuple[tuple[int, InfrastructureFactor, tuple[str, ...]], ...]
    total: InfrastructureFactor
    monolith_baseline: InfrastructureFactor
    total_cost: Fraction
    baseline_cost: Fraction


def build_infra_report(
    g: ApplicationGraph,
    p: PartitionSet,
    prices: PriceTable,
    *,
    compute_floor: bool = True,
    shared_database: bool = False,
) -> PartitionInfraReport:
    """Assemble the infrastructure report for a partitioning.

    ``shared_database`` switches databases to a shared-managed-service
    reading: each database counts once globally, attributed to the
    lowest-index partition touching it. It changes reporting only, never
    the partitioner's objective.
    """
    problems = validate_partition(g, p)
    if problems:
        raise InputError("; ".join(problems))
    touched = _touched_resources(g, p)

    if shared_database:
        seen_db: set[int] = set()
        for idx in range(p.k):
            keep = set()
            for rid in touched[idx]:
                if g.resources[rid].kind is ResourceKind.DATABASE:
                    if rid in seen_db:
                        continue
                    seen_db.add(rid)
                keep.add(rid)
            touched[idx] = keep

    per_partition = []
    total = InfrastructureFactor()
    for idx in range(p.k):
        counts: dict[ResourceKind, int] = {}
        for rid in touched[idx]:
            kind = g.resources[rid].kind
            counts[kind] = counts.get(kind, 0) + 1
        factor = factor_from_counts(counts)
        if compute_floor and factor.n_ec == 0:
            factor = InfrastructureFactor(1, factor.n_s3, factor.n_db, factor.n_ca)
        names = tuple(sorted(g.resources[rid].name for rid in touched[idx]))
        per_partition.append((idx, factor, names))
        total = total + factor

    baseline = monolith_baseline(g, compute_floor=compute_floor)
    return PartitionInfraReport(
        per_partition=tuple(per_partition),
        total=total,
        monolith_baseline=baseline,
        total_cost=infra_cost(total, prices),
        baseline_cost=infra_cost(baseline, prices),
    )


def load_price_table(data: bytes | str) -> PriceTable:
    """Read a price table from YAML with keys compute, database, cache,
    file_storage; missing keys keep their defaults."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = yaml.safe_load(data)
    except yaml.YAMLError as exc:
        raise InputError(f"malformed YAML: {exc}") from exc
    if doc is None:
        return PriceTable.default()
    if not isinstance(doc, dict):
        raise InputError("price table must be a YAML mapping")
    known = {"compute", "database", "cache", "file_storage"}
    unknown = set(doc) - known
    if unknown:
        raise InputError(f"unknown price table key {sorted(unknown)[0]!r}")
    values = {}
    for key in known & set(doc):
        value = as_fraction(doc[key])
        if value < 0:
            raise InputError(f"price for {key} must be >= 0, got {doc[key]!r}")
        values[key] = value
    return PriceTable(**values)


def report_to_doc(report: PartitionInfraReport) -> dict:
    return {
        "schema_version": 1,
        "per_partition": [
            {
                "partition": idx,
                "factor": factor_to_doc(factor),
                "resources": list(names),
            }
            for idx, factor, names in report.per_partition
        ],
        "total": factor_to_doc(report.total),
        "monolith_baseline": factor_to_doc(report.monolith_baseline),
        "total_cost": fraction_str(report.total_cost),
        "baseline_cost": fraction_str(report.baseline_cost),
    }


def infra_report_from_doc(doc: dict) -> PartitionInfraReport:
    try:
        per_partition = tuple(
            (
                int(entry["partition"]),
                factor_from_doc(entry["factor"]),
                tuple(str(n) for n in entry["resources"]),
            )
            for entry in doc["per_partition"]
        )
        return PartitionInfraReport(
            per_partition=per_partition,
            total=factor_from_doc(doc["total"]),
            monolith_baseline=factor_from_doc(doc["monolith_baseline"]),
            total_cost=as_fraction(doc["total_cost"]),
            baseline_cost=as_fraction(doc["baseline_cost"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed infrastructure report: {exc}") from exc
