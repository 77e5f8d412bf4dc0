"""Decomposition quality metrics: pairwise F1 against ground truth,
Newman-Girvan modularity, interface number, cluster statistics."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import yaml

from .infra import build_infra_report
from .ingest import DependencyRecord
from .model import (
    ApplicationGraph,
    EvaluationReport,
    InputError,
    PartitionSet,
    PriceTable,
    validate_partition,
)


@dataclass(frozen=True)
class GroundTruth:
    """Reference decomposition: class name to cluster label."""

    assignment: dict[str, str]

    def __post_init__(self) -> None:
        if not self.assignment:
            raise InputError("ground truth must not be empty")


def load_ground_truth(data: bytes | str) -> GroundTruth:
    """Read ground truth from YAML or JSON: a flat ``{class: label}`` map."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    text = data
    try:
        if text.lstrip()[:1] == "{":
            doc = json.loads(text)
        else:
            doc = yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise InputError(f"malformed ground truth: {exc}") from exc
    if not isinstance(doc, dict) or not doc:
        raise InputError("ground truth must be a non-empty mapping")
    return GroundTruth({str(k): str(v) for k, v in doc.items()})


def _check_partition(g: ApplicationGraph, p: PartitionSet) -> None:
    problems = validate_partition(g, p)
    if problems:
        raise InputError("; ".join(problems))


def compute_f1(
    p: PartitionSet, truth: GroundTruth, names: Sequence[str]
) -> Fraction:
    """Pairwise co-membership F1 between a partitioning and ground truth.

    Over unordered pairs of classes present in both: a pair is positive in
    a clustering when both classes share a cluster. F1 is the standard
    harmonic mean 2PR/(P+R); 0 when no pair is co-located in both.
    Classes absent from the truth are excluded from pair enumeration.
    """
    common = [cid for cid in range(len(names)) if names[cid] in truth.assignment]
    if not common:
        raise InputError("no classes in common between partition and ground truth")
    tp = fp = fn = 0
    for i, u in enumerate(common):
        for v in common[i + 1 :]:
            same_pred = p.assignment[u] == p.assignment[v]
            same_true = truth.assignment[names[u]] == truth.assignment[names[v]]
            if same_pred and same_true:
                tp += 1
            elif same_pred:
                fp += 1
            elif same_true:
                fn += 1
    if tp == 0:
        return Fraction(0)
    precision = Fraction(tp, tp + fp)
    recall = Fraction(tp, tp + fn)
    return 2 * precision * recall / (precision + recall)


def compute_ngm(
    g: ApplicationGraph, p: PartitionSet, *, weighted: bool = True
) -> Fraction:
    """Newman-Girvan modularity Q = sum over partitions of e_cc - a_c^2.

    e_cc is the fraction of edge weight inside partition c, a_c the
    fraction of edge-endpoint weight attached to c; with ``weighted`` off
    every class edge counts 1.
    """
    _check_partition(g, p)
    if not g.class_edges:
        raise InputError("modularity undefined: graph has no class edges")
    intra = [Fraction(0)] * p.k
    degree = [Fraction(0)] * p.k
    total = Fraction(0)
    for e in g.class_edges:
        w = e.weight if weighted else Fraction(1)
        total += w
        cu, cv = p.assignment[e.u], p.assignment[e.v]
        degree[cu] += w
        degree[cv] += w
        if cu == cv:
            intra[cu] += w
    if total == 0:
        raise InputError("modularity undefined: total edge weight is zero")
    q = Fraction(0)
    for c in range(p.k):
        e_cc = intra[c] / total
        a_c = degree[c] / (2 * total)
        q += e_cc - a_c * a_c
    return q


def compute_ifn(
    directed_deps: Sequence[DependencyRecord],
    p: PartitionSet,
    names: Sequence[str],
) -> tuple[int, Fraction, list[int]]:
    """Interface number: per partition, the count of classes receiving at
    least one dependency from another partition; returns (total, mean
    per partition, per-partition counts)."""
    id_by_name = {name: cid for cid, name in enumerate(names)}
    interfaces: list[set[int]] = [set() for _ in range(p.k)]
    for rec in directed_deps:
        try:
            u = id_by_name[rec.from_class]
            v = id_by_name[rec.to_class]
        except KeyError as exc:
            raise InputError(f"dependency names unknown class {exc.args[0]!r}") from exc
        pu, pv = p.assignment[u], p.assignment[v]
        if pu != pv:
            interfaces[pv].add(v)
    per_partition = [len(s) for s in interfaces]
    total = sum(per_partition)
    return total, Fraction(total, p.k), per_partition


@dataclass(frozen=True)
class ClusterStats:
    sizes: tuple[int, ...]
    minimum: int
    maximum: int
    mean: Fraction


def cluster_stats(p: PartitionSet) -> ClusterStats:
    """Partition sizes in ascending index order, with min/max/mean."""
    sizes = p.sizes()
    return ClusterStats(
        sizes=tuple(sizes),
        minimum=min(sizes),
        maximum=max(sizes),
        mean=Fraction(sum(sizes), len(sizes)),
    )


def edge_cut(g: ApplicationGraph, p: PartitionSet) -> Fraction:
    """Total weight of class edges crossing partitions."""
    _check_partition(g, p)
    return sum(
        (e.weight for e in g.class_edges if p.assignment[e.u] != p.assignment[e.v]),
        Fraction(0),
    )


def evaluate(
    g: ApplicationGraph,
    p: PartitionSet,
    deps: Sequence[DependencyRecord],
    truth: GroundTruth | None = None,
    prices: PriceTable | None = None,
    *,
    weighted_ngm: bool = True,
    compute_floor: bool = True,
) -> EvaluationReport:
    """Assemble the full evaluation report for one partitioning."""
    _check_partition(g, p)
    prices = prices if prices is not None else PriceTable.default()
    names = g.names()
    if g.class_edges:
        ngm = compute_ngm(g, p, weighted=weighted_ngm)
    else:
        ngm = Fraction(0)
    ifn_total, ifn_mean, _per = compute_ifn(deps, p, names)
    report = build_infra_report(g, p, prices, compute_floor=compute_floor)
    f1 = compute_f1(p, truth, names) if truth is not None else None
    return EvaluationReport(
        ngm=ngm,
        ifn_total=ifn_total,
        ifn_mean=ifn_mean,
        edge_cut=edge_cut(g, p),
        infra_total=report.total,
        infra_cost=report.total_cost,
        cluster_sizes=cluster_stats(p).sizes,
        f1=f1,
    )


def _fmt(x: Fraction | None, places: int = 4) -> str:
    if x is None:
        return "-"
    return f"{float(x):.{places}f}"


def format_table(rows: Sequence[tuple[str, EvaluationReport]]) -> str:
    """Aligned plain-text table over (dataset name, report) rows."""
    header = ("dataset", "k", "F1", "NGM", "IFN", "edge_cut", "infra_cost")
    body = []
    for name, r in rows:
        body.append(
            (
                name,
                str(len(r.cluster_sizes)),
                _fmt(r.f1),
                _fmt(r.ngm),
                str(r.ifn_total),
                _fmt(r.edge_cut, 2),
                _fmt(r.infra_cost, 2),
            )
        )
    widths = [
        max(len(header[i]), *(len(row[i]) for row in body)) if body else len(header[i])
        for i in range(len(header))
    ]
    lines = [
        "  ".join(header[i].ljust(widths[i]) for i in range(len(header))).rstrip()
    ]
    for row in body:
        lines.append(
            "  ".join(row[i].ljust(widths[i]) for i in range(len(header))).rstrip()
        )
    return "\n".join(lines)
