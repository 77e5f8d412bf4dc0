"""Core domain types shared by every stage of the decomposition pipeline.

Everything here is an immutable value object plus invariant validation and
the canonical JSON interchange. No parsing, no algorithms.

Numeric policy: all weights and costs are exact rationals
(:class:`fractions.Fraction`), serialized as decimal strings when the value
has a finite decimal expansion and as ``"p/q"`` otherwise. This keeps every
artifact bit-identical across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping

SCHEMA_VERSION = 1


class InputError(Exception):
    """Bad user input: malformed file, unknown enum value, invalid flag.

    The CLI maps this to exit code 2; anything else is an internal error.
    """


# ---------------------------------------------------------------------------
# rational helpers
# ---------------------------------------------------------------------------

def as_fraction(value: int | float | str | Fraction) -> Fraction:
    """Coerce a config/JSON value to an exact Fraction.

    Floats are routed through their shortest decimal repr, so a YAML ``0.1``
    means 1/10, not the nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"expected a number, got boolean {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational number: {value!r}") from exc
    raise InputError(f"not a rational number: {value!r}")


def fraction_str(x: Fraction) -> str:
    """Serialize a Fraction: exact decimal if one exists, else ``p/q``."""
    if x.denominator == 1:
        return str(x.numerator)
    den = x.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{x.numerator}/{x.denominator}"
    shift = max(twos, fives)
    scaled = abs(x.numerator) * 10**shift // x.denominator
    digits = str(scaled).rjust(shift + 1, "0")
    sign = "-" if x < 0 else ""
    return f"{sign}{digits[:-shift]}.{digits[-shift:]}"


# ---------------------------------------------------------------------------
# graph node and edge types
# ---------------------------------------------------------------------------

class ResourceKind(str, Enum):
    """The four infrastructure dependency kinds a class may bind to."""

    COMPUTE = "compute"
    FILE_STORAGE = "file_storage"
    DATABASE = "database"
    CACHE = "cache"


@dataclass(frozen=True)
class ClassNode:
    """One application class; ``weight`` is its balance weight (one class = 1)."""

    id: int
    name: str
    weight: int = 1


@dataclass(frozen=True)
class ResourceNode:
    """One infrastructure dependency referenced by classes."""

    id: int
    name: str
    kind: ResourceKind


@dataclass(frozen=True)
class ClassEdge:
    """Merged undirected edge between two classes.

    ``weight`` is recomposable from the components:
    ``relation_base + increment * shared_resource_count + beta * flow_cooccurrence``
    where beta and increment are recorded on the owning graph. Endpoints are
    stored canonically with ``u < v``.
    """

    u: int
    v: int
    weight: Fraction
    relation_base: Fraction = Fraction(0)
    shared_resource_count: int = 0
    flow_cooccurrence: int = 0

    def __post_init__(self) -> None:
        if self.u >= self.v:
            raise InputError(
                f"class edge endpoints must satisfy u < v, got ({self.u}, {self.v})"
            )


@dataclass(frozen=True)
class ResourceEdge:
    """Binding between a resource node and a class node that depends on it."""

    resource: int
    cls: int


@dataclass(frozen=True)
class FunctionalFlow:
    """Ordered set of classes exercised by one business use case.

    ``members`` holds class ids, de-duplicated; the first one is the entry point.
    """

    id: str
    members: tuple[int, ...]


@dataclass(frozen=True)
class ApplicationGraph:
    """The full application model: class nodes, resource nodes, flows, edges.

    ``beta`` and ``resource_increment`` record the weight-composition
    parameters the class edges were built with, so the recomposition
    invariant stays checkable on the graph alone.
    """

    classes: tuple[ClassNode, ...]
    resources: tuple[ResourceNode, ...] = ()
    flows: tuple[FunctionalFlow, ...] = ()
    resource_edges: tuple[ResourceEdge, ...] = ()
    class_edges: tuple[ClassEdge, ...] = ()
    beta: Fraction = Fraction(1)
    resource_increment: Fraction = Fraction(1)

    def class_count(self) -> int:
        return len(self.classes)

    def names(self) -> list[str]:
        return [c.name for c in self.classes]

    def id_by_name(self) -> dict[str, int]:
        return {c.name: c.id for c in self.classes}


def adjacency(g: ApplicationGraph) -> list[list[tuple[int, Fraction]]]:
    """Per-class adjacency lists ``[(neighbor, weight), ...]`` sorted by id."""
    adj: list[list[tuple[int, Fraction]]] = [[] for _ in g.classes]
    for e in g.class_edges:
        adj[e.u].append((e.v, e.weight))
        adj[e.v].append((e.u, e.weight))
    for lst in adj:
        lst.sort(key=lambda t: t[0])
    return adj


def bindings_by_class(g: ApplicationGraph) -> list[set[int]]:
    """Resource ids bound to each class, indexed by class id."""
    bound: list[set[int]] = [set() for _ in g.classes]
    for re_ in g.resource_edges:
        bound[re_.cls].add(re_.resource)
    return bound


def clients_by_resource(g: ApplicationGraph) -> list[set[int]]:
    """Class ids bound to each resource, indexed by resource id."""
    clients: list[set[int]] = [set() for _ in g.resources]
    for re_ in g.resource_edges:
        clients[re_.resource].add(re_.cls)
    return clients


def total_edge_weight(g: ApplicationGraph) -> Fraction:
    return sum((e.weight for e in g.class_edges), Fraction(0))


# ---------------------------------------------------------------------------
# partitions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PartitionSet:
    """Assignment of every class node to exactly one of ``k`` partitions.

    ``assignment[class_id]`` is the partition index; class ids are dense so a
    tuple doubles as the map.
    """

    k: int
    assignment: tuple[int, ...]

    def members(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.k)]
        for cid, part in enumerate(self.assignment):
            out[part].append(cid)
        return out

    def sizes(self) -> list[int]:
        counts = [0] * self.k
        for part in self.assignment:
            counts[part] += 1
        return counts


def validate_partition(g: ApplicationGraph, p: PartitionSet) -> list[str]:
    """Violations of the partition contract against ``g``; empty means valid."""
    problems = []
    if p.k < 1:
        problems.append(f"partition count k={p.k} must be >= 1")
        return problems
    if len(p.assignment) != len(g.classes):
        problems.append(
            f"assignment covers {len(p.assignment)} classes, graph has {len(g.classes)}"
        )
        return problems
    used = set()
    for cid, part in enumerate(p.assignment):
        if not 0 <= part < p.k:
            problems.append(f"class {cid} assigned to out-of-range partition {part}")
        else:
            used.add(part)
    missing = sorted(set(range(p.k)) - used)
    for part in missing:
        problems.append(f"partition {part} is empty")
    return problems


# ---------------------------------------------------------------------------
# infrastructure factors and prices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InfrastructureFactor:
    """Counts of cloud components: compute, file storage, database, cache."""

    n_ec: int = 0
    n_s3: int = 0
    n_db: int = 0
    n_ca: int = 0

    def __add__(self, other: "InfrastructureFactor") -> "InfrastructureFactor":
        return InfrastructureFactor(
            self.n_ec + other.n_ec,
            self.n_s3 + other.n_s3,
            self.n_db + other.n_db,
            self.n_ca + other.n_ca,
        )

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.n_ec, self.n_s3, self.n_db, self.n_ca)

    def dominates(self, other: "InfrastructureFactor") -> bool:
        """Component-wise >= comparison."""
        return all(a >= b for a, b in zip(self.as_tuple(), other.as_tuple()))


FACTOR_FIELD_BY_KIND: dict[ResourceKind, str] = {
    ResourceKind.COMPUTE: "n_ec",
    ResourceKind.FILE_STORAGE: "n_s3",
    ResourceKind.DATABASE: "n_db",
    ResourceKind.CACHE: "n_ca",
}


def factor_from_counts(counts: Mapping[ResourceKind, int]) -> InfrastructureFactor:
    return InfrastructureFactor(
        n_ec=counts.get(ResourceKind.COMPUTE, 0),
        n_s3=counts.get(ResourceKind.FILE_STORAGE, 0),
        n_db=counts.get(ResourceKind.DATABASE, 0),
        n_ca=counts.get(ResourceKind.CACHE, 0),
    )


@dataclass(frozen=True)
class PriceTable:
    """Currency units per resource instance, one entry per kind."""

    compute: Fraction = Fraction(1)
    database: Fraction = Fraction(2)
    cache: Fraction = Fraction(1, 2)
    file_storage: Fraction = Fraction(1, 4)

    def unit_cost(self, kind: ResourceKind) -> Fraction:
        return {
            ResourceKind.COMPUTE: self.compute,
            ResourceKind.DATABASE: self.database,
            ResourceKind.CACHE: self.cache,
            ResourceKind.FILE_STORAGE: self.file_storage,
        }[kind]

    @classmethod
    def default(cls) -> "PriceTable":
        """Illustrative defaults; tune via a prices YAML for real platforms."""
        return cls()


# ---------------------------------------------------------------------------
# evaluation report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EvaluationReport:
    """All decomposition metrics for one partition of one graph.

    ``f1`` is None when no ground truth was supplied.
    """

    ngm: Fraction
    ifn_total: int
    ifn_mean: Fraction
    edge_cut: Fraction
    infra_total: InfrastructureFactor
    infra_cost: Fraction
    cluster_sizes: tuple[int, ...]
    f1: Fraction | None = None


# ---------------------------------------------------------------------------
# graph validation
# ---------------------------------------------------------------------------

def validate_graph(g: ApplicationGraph) -> list[str]:
    """All invariant violations in ``g``; an empty list means well-formed.

    Violations are data, not failures: each entry names the offending node
    or edge so callers can report precisely.
    """
    problems: list[str] = []
    n = len(g.classes)
    m = len(g.resources)

    seen_names: set[str] = set()
    for i, c in enumerate(g.classes):
        if c.id != i:
            problems.append(f"class ids not dense: index {i} holds id {c.id}")
        if not c.name:
            problems.append(f"class {c.id} has an empty name")
        elif c.name in seen_names:
            problems.append(f"duplicate class name {c.name!r}")
        else:
            seen_names.add(c.name)
        if c.weight < 1:
            problems.append(f"class {c.name!r} has weight {c.weight} < 1")

    seen_res: set[str] = set()
    for i, r in enumerate(g.resources):
        if r.id != i:
            problems.append(f"resource ids not dense: index {i} holds id {r.id}")
        if r.name in seen_res:
            problems.append(f"duplicate resource name {r.name!r}")
        else:
            seen_res.add(r.name)

    seen_pairs: set[tuple[int, int]] = set()
    for e in g.class_edges:
        if not (0 <= e.u < n) or not (0 <= e.v < n):
            problems.append(f"class edge ({e.u}, {e.v}) references a missing class id")
            continue
        if e.u == e.v:
            problems.append(f"class edge ({e.u}, {e.v}) is a self-loop")
            continue
        pair = (min(e.u, e.v), max(e.u, e.v))
        if pair in seen_pairs:
            problems.append(f"parallel class edge on pair {pair}")
        seen_pairs.add(pair)
        if e.weight < 0 or e.relation_base < 0:
            problems.append(f"class edge {pair} has a negative component")
        if e.shared_resource_count < 0 or e.flow_cooccurrence < 0:
            problems.append(f"class edge {pair} has a negative component")
        recomposed = (
            e.relation_base
            + g.resource_increment * e.shared_resource_count
            + g.beta * e.flow_cooccurrence
        )
        if e.weight != recomposed:
            problems.append(
                f"class edge {pair} weight {e.weight} != recomposed {recomposed}"
            )

    seen_bindings: set[tuple[int, int]] = set()
    for re_ in g.resource_edges:
        if not (0 <= re_.resource < m):
            problems.append(f"resource edge references missing resource id {re_.resource}")
            continue
        if not (0 <= re_.cls < n):
            problems.append(f"resource edge references missing class id {re_.cls}")
            continue
        key = (re_.resource, re_.cls)
        if key in seen_bindings:
            problems.append(f"duplicate resource edge {key}")
        seen_bindings.add(key)

    for flow in g.flows:
        if not flow.members:
            problems.append(f"flow {flow.id!r} has no members")
        for cid in flow.members:
            if not (0 <= cid < n):
                problems.append(f"flow {flow.id!r} references missing class id {cid}")

    return problems


# ---------------------------------------------------------------------------
# canonical JSON interchange
# ---------------------------------------------------------------------------

def graph_to_doc(g: ApplicationGraph) -> dict:
    """The canonical interchange document for a graph (JSON-serializable)."""
    return {
        "schema_version": SCHEMA_VERSION,
        "beta": fraction_str(g.beta),
        "resource_increment": fraction_str(g.resource_increment),
        "classes": [
            {"id": c.id, "name": c.name, "weight": c.weight} for c in g.classes
        ],
        "resources": [
            {"id": r.id, "name": r.name, "kind": r.kind.value} for r in g.resources
        ],
        "flows": [{"id": f.id, "members": list(f.members)} for f in g.flows],
        "resource_edges": [
            {"resource": e.resource, "class": e.cls} for e in g.resource_edges
        ],
        "class_edges": [
            {
                "u": e.u,
                "v": e.v,
                "weight": fraction_str(e.weight),
                "relation_base": fraction_str(e.relation_base),
                "shared_resource_count": e.shared_resource_count,
                "flow_cooccurrence": e.flow_cooccurrence,
            }
            for e in g.class_edges
        ],
    }


def _check_schema_version(doc: Mapping, what: str) -> None:
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise InputError(f"{what}: unsupported schema_version {version!r}")


def graph_from_doc(doc: Mapping) -> ApplicationGraph:
    """Parse the canonical interchange document back into a graph."""
    if not isinstance(doc, Mapping):
        raise InputError("graph document must be a JSON object")
    _check_schema_version(doc, "graph document")
    try:
        classes = tuple(
            ClassNode(int(c["id"]), str(c["name"]), int(c.get("weight", 1)))
            for c in doc.get("classes", [])
        )
        resources = tuple(
            ResourceNode(int(r["id"]), str(r["name"]), ResourceKind(r["kind"]))
            for r in doc.get("resources", [])
        )
        flows = tuple(
            FunctionalFlow(str(f["id"]), tuple(int(x) for x in f["members"]))
            for f in doc.get("flows", [])
        )
        resource_edges = tuple(
            ResourceEdge(int(e["resource"]), int(e["class"]))
            for e in doc.get("resource_edges", [])
        )
        class_edges = tuple(
            ClassEdge(
                int(e["u"]),
                int(e["v"]),
                as_fraction(e["weight"]),
                as_fraction(e.get("relation_base", 0)),
                int(e.get("shared_resource_count", 0)),
                int(e.get("flow_cooccurrence", 0)),
            )
            for e in doc.get("class_edges", [])
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed graph document: {exc}") from exc
    return ApplicationGraph(
        classes=classes,
        resources=resources,
        flows=flows,
        resource_edges=resource_edges,
        class_edges=class_edges,
        beta=as_fraction(doc.get("beta", 1)),
        resource_increment=as_fraction(doc.get("resource_increment", 1)),
    )


def partition_to_doc(
    p: PartitionSet,
    g: ApplicationGraph,
    *,
    objective: Fraction | None = None,
    seed: int | None = None,
) -> dict:
    assignment = {
        g.classes[cid].name: part for cid, part in enumerate(p.assignment)
    }
    doc: dict = {
        "schema_version": SCHEMA_VERSION,
        "k": p.k,
        "assignment": {name: assignment[name] for name in sorted(assignment)},
    }
    if objective is not None:
        doc["objective"] = fraction_str(objective)
    if seed is not None:
        doc["seed"] = seed
    return doc


def partition_from_doc(doc: Mapping, g: ApplicationGraph) -> PartitionSet:
    if not isinstance(doc, Mapping):
        raise InputError("partition document must be a JSON object")
    _check_schema_version(doc, "partition document")
    try:
        k = int(doc["k"])
        raw = doc["assignment"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed partition document: {exc}") from exc
    ids = g.id_by_name()
    assignment = [-1] * len(g.classes)
    for name, part in raw.items():
        if name not in ids:
            raise InputError(f"partition references unknown class {name!r}")
        assignment[ids[name]] = int(part)
    for cid, part in enumerate(assignment):
        if part < 0:
            raise InputError(
                f"partition is missing class {g.classes[cid].name!r}"
            )
    p = PartitionSet(k=k, assignment=tuple(assignment))
    problems = validate_partition(g, p)
    if problems:
        raise InputError("invalid partition: " + "; ".join(problems))
    return p


def factor_to_doc(f: InfrastructureFactor) -> dict:
    return {"n_ec": f.n_ec, "n_s3": f.n_s3, "n_db": f.n_db, "n_ca": f.n_ca}


def factor_from_doc(doc: Mapping) -> InfrastructureFactor:
    try:
        return InfrastructureFactor(
            int(doc["n_ec"]), int(doc["n_s3"]), int(doc["n_db"]), int(doc["n_ca"])
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed infrastructure factor: {exc}") from exc


def report_to_doc(r: EvaluationReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "f1": None if r.f1 is None else fraction_str(r.f1),
        "ngm": fraction_str(r.ngm),
        "ifn_total": r.ifn_total,
        "ifn_mean": fraction_str(r.ifn_mean),
        "edge_cut": fraction_str(r.edge_cut),
        "infra_total": factor_to_doc(r.infra_total),
        "infra_cost": fraction_str(r.infra_cost),
        "cluster_sizes": list(r.cluster_sizes),
    }


def report_from_doc(doc: Mapping) -> EvaluationReport:
    _check_schema_version(doc, "evaluation document")
    try:
        return EvaluationReport(
            f1=None if doc.get("f1") is None else as_fraction(doc["f1"]),
            ngm=as_fraction(doc["ngm"]),
            ifn_total=int(doc["ifn_total"]),
            ifn_mean=as_fraction(doc["ifn_mean"]),
            edge_cut=as_fraction(doc["edge_cut"]),
            infra_total=factor_from_doc(doc["infra_total"]),
            infra_cost=as_fraction(doc["infra_cost"]),
            cluster_sizes=tuple(int(x) for x in doc["cluster_sizes"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed evaluation document: {exc}") from exc
