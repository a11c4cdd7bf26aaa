"""Feynman graphs: directed edges, external legs, incidence matrices and routing.

Brute-force tree and forest enumerations live here too; they are the
independent oracles the polynomial code is checked against.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

from .errors import ConsistencyError, DomainError, SchemaError
from .linalg import ExactMatrix
from .matroid import RepresentedMatroid
from .poly import var_key


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    mass2: str | None = None


@dataclass(frozen=True)
class Leg:
    """External leg carrying momentum `symbol` into `vertex`."""

    id: str
    vertex: str
    symbol: str


@dataclass(frozen=True)
class FeynGraph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    externals: tuple[Leg, ...] = ()
    name: str = ""

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise SchemaError("vertex ids are not distinct")
        ids = [e.id for e in self.edges] + [leg.id for leg in self.externals]
        if len(set(ids)) != len(ids):
            raise SchemaError("edge / leg ids are not distinct")
        vs = set(self.vertices)
        for e in self.edges:
            if e.tail not in vs or e.head not in vs:
                raise SchemaError(f"edge {e.id!r} has an endpoint that is not a vertex")
        for leg in self.externals:
            if leg.vertex not in vs:
                raise SchemaError(f"leg {leg.id!r} attaches to unknown vertex {leg.vertex!r}")
        symbols = [leg.symbol for leg in self.externals]
        if len(set(symbols)) != len(symbols):
            raise SchemaError("external momentum symbols are not distinct")

    @classmethod
    def build(cls, vertices: Iterable, edges: Iterable, externals: Iterable = (),
              name: str = "") -> "FeynGraph":
        """Convenience constructor from plain tuples: edges (id, tail, head[, mass2])."""
        es = tuple(e if isinstance(e, Edge) else Edge(*map(_opt_str, e)) for e in edges)
        legs = tuple(x if isinstance(x, Leg) else Leg(*map(str, x)) for x in externals)
        return cls(tuple(str(v) for v in vertices), es, legs, name)

    @property
    def edge_ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.edges)

    def edge(self, eid: str) -> Edge:
        for e in self.edges:
            if e.id == eid:
                return e
        raise DomainError(f"no edge {eid!r}")

    def masses(self) -> dict[str, str]:
        return {e.id: e.mass2 for e in self.edges if e.mass2}

    def components(self, edge_subset: Iterable[str] | None = None) -> list[list[str]]:
        """Vertex sets of connected components (using only `edge_subset` if given)."""
        keep = None if edge_subset is None else set(edge_subset)
        uf = _UnionFind(self.vertices)
        for e in self.edges:
            if keep is None or e.id in keep:
                uf.union(e.tail, e.head)
        groups: dict[str, list[str]] = {}
        for v in self.vertices:
            groups.setdefault(uf.find(v), []).append(v)
        return sorted(groups.values(), key=lambda g: self.vertices.index(g[0]))

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def loop_number(self) -> int:
        return len(self.edges) - len(self.vertices) + len(self.components())

    # serialization

    def to_dict(self) -> dict:
        doc: dict = {}
        if self.name:
            doc["name"] = self.name
        doc["vertices"] = list(self.vertices)
        doc["edges"] = []
        for e in self.edges:
            item = {"id": e.id, "tail": e.tail, "head": e.head}
            if e.mass2:
                item["mass2"] = e.mass2
            doc["edges"].append(item)
        doc["externals"] = [{"id": x.id, "vertex": x.vertex, "symbol": x.symbol}
                            for x in self.externals]
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping) -> "FeynGraph":
        if not isinstance(doc, Mapping):
            raise SchemaError("graph document must be a JSON object")
        for key in ("vertices", "edges"):
            if key not in doc:
                raise SchemaError(f"graph document is missing field {key!r}")
        try:
            edges = []
            for i, item in enumerate(doc["edges"]):
                missing = {"id", "tail", "head"} - set(item)
                if missing:
                    raise SchemaError(f"edges[{i}] is missing {sorted(missing)}")
                edges.append(Edge(str(item["id"]), str(item["tail"]), str(item["head"]),
                                  item.get("mass2")))
            legs = []
            for i, item in enumerate(doc.get("externals", [])):
                missing = {"id", "vertex", "symbol"} - set(item)
                if missing:
                    raise SchemaError(f"externals[{i}] is missing {sorted(missing)}")
                legs.append(Leg(str(item["id"]), str(item["vertex"]), str(item["symbol"])))
        except TypeError as exc:
            raise SchemaError(f"malformed graph document: {exc}") from None
        return cls(tuple(str(v) for v in doc["vertices"]), tuple(edges), tuple(legs),
                   str(doc.get("name", "")))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "FeynGraph":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"line {exc.lineno}: {exc.msg}") from None
        return cls.from_dict(doc)


def load_graph(path: str | Path) -> FeynGraph:
    return FeynGraph.from_json(Path(path).read_text())


def _opt_str(x):
    return None if x is None else str(x)


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def incidence_matrix(g: FeynGraph) -> ExactMatrix:
    """v x e matrix: -1 where an edge begins, +1 where it ends; self-loops give 0."""
    vidx = {v: i for i, v in enumerate(g.vertices)}
    rows = [[0] * len(g.edges) for _ in g.vertices]
    for j, e in enumerate(g.edges):
        rows[vidx[e.tail]][j] -= 1
        rows[vidx[e.head]][j] += 1
    return ExactMatrix.from_rows(rows, g.edge_ids)


def leg_columns(g: FeynGraph) -> ExactMatrix:
    """v x k block with +1 where each leg enters (legs read as edges from infinity)."""
    vidx = {v: i for i, v in enumerate(g.vertices)}
    rows = [[0] * len(g.externals) for _ in g.vertices]
    for j, leg in enumerate(g.externals):
        rows[vidx[leg.vertex]][j] = 1
    return ExactMatrix.from_rows(rows, [leg.id for leg in g.externals])


def extended_incidence(g: FeynGraph) -> ExactMatrix:
    """Incidence of the graph with every leg joined to a vertex at infinity, that row dropped."""
    inc, legs = incidence_matrix(g), leg_columns(g)
    rows = [a + b for a, b in zip(inc.rows, legs.rows)]
    return ExactMatrix(tuple(rows), inc.labels + legs.labels)


def _dropped_rows(g: FeynGraph) -> set[int]:
    vidx = {v: i for i, v in enumerate(g.vertices)}
    return {max(vidx[v] for v in comp) for comp in g.components()}


def cycle_matroid(g: FeynGraph) -> RepresentedMatroid:
    """Reduced incidence matrix: the highest-indexed vertex of each component removed."""
    inc = incidence_matrix(g)
    drop = _dropped_rows(g)
    return RepresentedMatroid(inc.with_rows(r for i, r in enumerate(inc.rows) if i not in drop))


def simple_cycles(g: FeynGraph) -> set[frozenset]:
    """Edge sets of all cycles without repeated vertices, by subset filtration (oracle)."""
    out = set()
    for k in range(1, len(g.edges) + 1):
        for sub in itertools.combinations(g.edges, k):
            degree: dict[str, int] = {}
            for e in sub:
                degree[e.tail] = degree.get(e.tail, 0) + 1
                degree[e.head] = degree.get(e.head, 0) + 1
            if any(d != 2 for d in degree.values()):
                continue
            ids = [e.id for e in sub]
            touched = set(degree)
            sub_graph = FeynGraph(tuple(v for v in g.vertices if v in touched), tuple(sub))
            if len(sub_graph.components()) == 1:
                out.add(frozenset(ids))
    return out


def _require_connected(g: FeynGraph):
    comps = g.components()
    if len(comps) > 1:
        raise DomainError(f"graph is disconnected; components: {comps}")


def _acyclic(g: FeynGraph, edge_ids: Iterable[str]) -> bool:
    uf = _UnionFind(g.vertices)
    for eid in edge_ids:
        e = g.edge(eid)
        if not uf.union(e.tail, e.head):
            return False
    return True


def spanning_trees(g: FeynGraph) -> set[frozenset]:
    """All spanning trees as edge-id sets, by exhaustive filtration."""
    _require_connected(g)
    k = len(g.vertices) - 1
    return {frozenset(s) for s in itertools.combinations(g.edge_ids, k) if _acyclic(g, s)}


@dataclass(frozen=True)
class TwoForest:
    edges: frozenset
    parts: frozenset  # two frozensets of vertices


def two_forests(g: FeynGraph) -> list[TwoForest]:
    """All spanning forests with exactly two trees, tagged with their vertex bipartition."""
    _require_connected(g)
    k = len(g.vertices) - 2
    if k < 0:
        return []
    out = []
    for s in itertools.combinations(g.edge_ids, k):
        if not _acyclic(g, s):
            continue
        comps = g.components(s)
        out.append(TwoForest(frozenset(s), frozenset(frozenset(c) for c in comps)))
    return out


@dataclass(frozen=True)
class Momentum:
    """Integer (or rational) combination of loop and external momentum symbols."""

    coeffs: tuple[tuple[str, Fraction], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[str, object]) -> "Momentum":
        items = [(k, Fraction(v)) for k, v in mapping.items() if Fraction(v)]
        return cls(tuple(sorted(items, key=lambda t: _symbol_key(t[0]))))

    @classmethod
    def symbol(cls, name: str) -> "Momentum":
        return cls.of({name: 1})

    def as_dict(self) -> dict[str, Fraction]:
        return dict(self.coeffs)

    def __add__(self, other: "Momentum") -> "Momentum":
        d = self.as_dict()
        for k, v in other.coeffs:
            d[k] = d.get(k, 0) + v
        return Momentum.of(d)

    def __neg__(self) -> "Momentum":
        return Momentum.of({k: -v for k, v in self.coeffs})

    def __sub__(self, other: "Momentum") -> "Momentum":
        return self + (-other)

    def __mul__(self, c) -> "Momentum":
        return Momentum.of({k: v * Fraction(c) for k, v in self.coeffs})

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.coeffs)

    def subs(self, values: Mapping[str, "Momentum"]) -> "Momentum":
        out = Momentum()
        for k, v in self.coeffs:
            out = out + (values[k] * v if k in values else Momentum.of({k: v}))
        return out

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, v in self.coeffs:
            mag = abs(v)
            body = k if mag == 1 else f"{mag}*{k}"
            parts.append(("-" if v < 0 else "+", body))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


def _symbol_key(name: str):
    # loop symbols before external ones
    return (0 if name.startswith("l") else 1, var_key(name))


@dataclass(frozen=True)
class Routing:
    """Edge momenta satisfying conservation at every vertex.

    `injection[v]` is the external momentum entering at v, already written with
    the per-component conservation relation substituted (see `relations`), so
    that  incidence @ momenta + injection == 0  holds identically.
    """

    momenta: dict = field(default_factory=dict)
    loops: tuple[str, ...] = ()
    injection: dict = field(default_factory=dict)
    relations: dict = field(default_factory=dict)

    def __getitem__(self, eid: str) -> Momentum:
        return self.momenta[eid]

    def conservation_residuals(self, g: FeynGraph) -> dict[str, Momentum]:
        out = {v: self.injection.get(v, Momentum()) for v in g.vertices}
        for e in g.edges:
            out[e.head] = out[e.head] + self.momenta[e.id]
            out[e.tail] = out[e.tail] - self.momenta[e.id]
        return out

    def check(self, g: FeynGraph) -> bool:
        return not any(self.conservation_residuals(g).values())


def first_spanning_forest(g: FeynGraph) -> list[str]:
    """Greedy forest in edge order: the lexicographically first spanning forest."""
    uf = _UnionFind(g.vertices)
    return [e.id for e in g.edges if uf.union(e.tail, e.head)]


def route_momenta(g: FeynGraph) -> Routing:
    """Fundamental-cycle routing on the first spanning forest.

    Chord number i carries loop symbol l<i> around its fundamental cycle; every
    external leg except the last one in its component is routed through the
    tree to the vertex of that last leg, whose symbol is eliminated by momentum
    conservation.
    """
    tree = first_spanning_forest(g)
    tree_set = set(tree)
    adj: dict[str, list[tuple[str, str, int]]] = {v: [] for v in g.vertices}
    for e in g.edges:
        if e.id in tree_set:
            adj[e.tail].append((e.head, e.id, +1))
            adj[e.head].append((e.tail, e.id, -1))

    def tree_path(src: str, dst: str) -> list[tuple[str, int]]:
        # (edge id, +1 if traversed along its orientation)
        prev: dict[str, tuple[str, str, int] | None] = {src: None}
        stack = [src]
        while stack:
            u = stack.pop()
            for w, eid, sgn in adj[u]:
                if w not in prev:
                    prev[w] = (u, eid, sgn)
                    stack.append(w)
        path = []
        v = dst
        while prev[v] is not None:
            u, eid, sgn = prev[v]
            path.append((eid, sgn))
            v = u
        return path[::-1]

    momenta = {e.id: Momentum() for e in g.edges}
    loops = []
    for e in g.edges:
        if e.id in tree_set:
            continue
        sym = f"l{len(loops) + 1}"
        loops.append(sym)
        ell = Momentum.symbol(sym)
        momenta[e.id] = momenta[e.id] + ell
        # close the cycle: flow from head back to tail through the tree
        for eid, sgn in tree_path(e.head, e.tail):
            momenta[eid] = momenta[eid] + ell * sgn

    injection: dict[str, Momentum] = {}
    relations: dict[str, Momentum] = {}
    comp_of = {}
    for idx, comp in enumerate(g.components()):
        for v in comp:
            comp_of[v] = idx
    by_comp: dict[int, list] = {}
    for leg in g.externals:
        by_comp.setdefault(comp_of[leg.vertex], []).append(leg)
    for legs in by_comp.values():
        if len(legs) == 1:
            raise ConsistencyError(
                f"leg {legs[0].id!r} is alone in its component; its momentum cannot be conserved")
        sink = legs[-1]
        relations[sink.symbol] = -sum((Momentum.symbol(x.symbol) for x in legs[:-1]), Momentum())
        for leg in legs:
            q = relations.get(leg.symbol, Momentum.symbol(leg.symbol))
            injection[leg.vertex] = injection.get(leg.vertex, Momentum()) + q
        for leg in legs[:-1]:
            q = Momentum.symbol(leg.symbol)
            for eid, sgn in tree_path(leg.vertex, sink.vertex):
                momenta[eid] = momenta[eid] + q * sgn
    return Routing(momenta, tuple(loops), injection, relations)
