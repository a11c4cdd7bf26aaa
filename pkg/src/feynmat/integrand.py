"""Feynman integrals read off a represented matroid.

Every internal column is a propagator 1/(k_e^2 + m_e^2)^(nu_e + shift) and
every row a delta function of the signed sum of momenta across it. The
matrix is brought to a canonical form first, so equivalent representations
emit identical documents.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import SchemaError
from .graph import FeynGraph
from .linalg import ExactMatrix, rank, rref
from .matroid import RepresentedMatroid
from .poly import Poly, var_key
from .reduce import ReducedForm, ScalarTerm, reduce_graph
from .symanzik import DotTable, phi_second, psi_base_expansion


@dataclass(frozen=True)
class PropagatorSpec:
    edge: str
    momentum: str
    mass2: str | None
    power: str
    shift: int = 0

    def exponent(self) -> str:
        if not self.shift:
            return self.power
        return f"{self.power} {'+' if self.shift > 0 else '-'} {abs(self.shift)}"


@dataclass(frozen=True)
class DeltaFactor:
    coefficients: tuple[tuple[str, int], ...]   # momentum symbol -> coefficient

    def __str__(self):
        text = ""
        for sym, c in self.coefficients:
            mag = abs(c)
            body = sym if mag == 1 else f"{mag}*{sym}"
            if not text:
                text = ("-" if c < 0 else "") + body
            else:
                text += f" {'-' if c < 0 else '+'} {body}"
        return f"delta({text or '0'})"


@dataclass(frozen=True)
class MomentumSpaceIntegrand:
    deltas: tuple[DeltaFactor, ...]
    propagators: tuple[PropagatorSpec, ...]
    loops: int
    externals: tuple[str, ...] = ()

    @property
    def measure(self) -> tuple[str, ...]:
        return tuple(p.momentum for p in self.propagators)

    def conservation_count(self) -> int:
        """Delta factors involving only external momenta."""
        ext = set(self.externals)
        return sum(1 for d in self.deltas if all(s in ext for s, _ in d.coefficients))

    def free_momenta(self) -> int:
        return len(self.propagators) - (len(self.deltas) - self.conservation_count())


@dataclass(frozen=True)
class ParametricIntegrand:
    first: Poly
    second: Poly | None
    powers: tuple[tuple[str, str, int], ...]   # (edge, base power, shift)
    variables: tuple[str, ...] = ()


def _signed_forest(rows: list[list], ncols: int) -> tuple[list[int], list[int]]:
    """Row and column signs making every entry on a spanning forest of the support +1.

    Only the first `ncols` columns take part. Each connected block of rows and
    columns still has one free global sign, which leaves the first `ncols`
    columns alone but flips the rest; it is chosen so that the first nonzero
    entry outside them (scanning the block's rows in order) is positive.
    """
    nr = len(rows)
    rs: list[int | None] = [None] * nr
    cs: list[int | None] = [None] * ncols
    for root in range(nr):
        if rs[root] is not None:
            continue
        rs[root] = 1
        block_rows, block_cols = [root], []
        queue = deque([("r", root)])
        while queue:
            kind, i = queue.popleft()
            if kind == "r":
                for c in range(ncols):
                    x = rows[i][c]
                    if x and cs[c] is None:
                        cs[c] = 1 if x * rs[i] > 0 else -1
                        block_cols.append(c)
                        queue.append(("c", c))
            else:
                for t in range(nr):
                    x = rows[t][i]
                    if x and rs[t] is None:
                        rs[t] = 1 if x * cs[i] > 0 else -1
                        block_rows.append(t)
                        queue.append(("r", t))
        lead = next((rows[t][c] * rs[t] for t in sorted(block_rows)
                     for c in range(ncols, len(rows[t])) if rows[t][c]), 1)
        if lead < 0:
            for t in block_rows:
                rs[t] = -rs[t]
            for c in block_cols:
                cs[c] = -cs[c]
    return [s or 1 for s in rs], [s or 1 for s in cs]


def canonical_matrix(m: ExactMatrix, legs: Sequence[str] = ()) -> ExactMatrix:
    """Representative of m up to row operations, internal +-1 column scalings and column order.

    Columns are sorted (internal first, then legs, natural order) and the matrix
    is put in reduced row echelon form. Signs are then fixed on a breadth-first
    spanning forest of the nonzero pattern of the internal columns, and rref is
    taken once more. External columns are never rescaled, so external momenta
    keep their orientation.
    """
    legs = list(legs)
    internal = sorted((c for c in m.labels if c not in legs), key=var_key)
    order = internal + sorted(legs, key=var_key)
    red, _ = rref(m.select(order))
    rows = [list(r) for r in red.rows]
    rs, cs = _signed_forest(rows, len(internal))
    cs += [1] * len(legs)
    rows = [[x * rs[i] * cs[j] for j, x in enumerate(r)] for i, r in enumerate(rows)]
    red2, _ = rref(red.with_rows(rows))
    return red2


def _source(source, legs, leg_symbols=None):
    """(full matrix, leg labels, masses, leg symbols)."""
    if isinstance(source, ReducedForm):
        g = source.graph
        full = source.full_matrix()
        leg_ids = list(source.legs.labels) if source.legs is not None else []
        return full, leg_ids, g.masses(), {x.id: x.symbol for x in g.externals}
    if isinstance(source, FeynGraph):
        return _source(reduce_graph(source, (), include_legs=True), legs)
    matrix = source.matrix if isinstance(source, RepresentedMatroid) else source
    if not isinstance(matrix, ExactMatrix):
        raise SchemaError(f"cannot emit an integrand from {type(source).__name__}")
    if any(not lab for lab in matrix.labels):
        raise SchemaError("every column needs a label")
    leg_ids = list(legs or [])
    unknown = [x for x in leg_ids if x not in matrix.labels]
    if unknown:
        raise SchemaError(f"external columns {unknown} are not labels of the matrix")
    return matrix, leg_ids, {}, dict(leg_symbols or {})


def momentum_space(source, *, legs: Sequence[str] | None = None,
                   shifts: Mapping[str, int] | None = None,
                   masses: Mapping[str, str] | None = None,
                   leg_symbols: Mapping[str, str] | None = None) -> MomentumSpaceIntegrand:
    """Delta factors (one per row of the canonical matrix) and propagators.

    `source` is a ReducedForm, a graph, or a labelled matrix / matroid whose
    external columns are named in `legs`. External columns enter the delta
    factors only, under their `leg_symbols` names when given.
    """
    full, leg_ids, graph_masses, leg_symbols = _source(source, legs, leg_symbols)
    mass = dict(graph_masses)
    mass.update(masses or {})
    shifts = dict(shifts or {})
    canon = canonical_matrix(full, leg_ids)
    leg_set = set(leg_ids)

    def sym(label: str) -> str:
        return leg_symbols.get(label, label) if label in leg_set else f"k_{label}"

    deltas = []
    for row in canon.rows:
        deltas.append(DeltaFactor(tuple((sym(lab), int(x)) for lab, x in zip(canon.labels, row) if x)))
    internal = [c for c in canon.labels if c not in leg_set]
    props = tuple(PropagatorSpec(e, f"k_{e}", mass.get(e), f"nu_{e}", int(shifts.get(e, 0)))
                  for e in internal)
    loops = len(internal) - (rank(full.select(internal)) if internal else 0)
    return MomentumSpaceIntegrand(tuple(deltas), props, loops,
                                  tuple(sym(x) for x in sorted(leg_ids, key=var_key)))


def parametric(source, *, legs: Sequence[str] | None = None, dots: DotTable | None = None,
               shifts: Mapping[str, int] | None = None) -> ParametricIntegrand:
    """Psi, Phi and the propagator powers; nothing is integrated.

    Phi is omitted (None) when the source has no external legs.
    """
    full, leg_ids, _, leg_symbols = _source(source, legs)
    shifts = dict(shifts or {})
    internal_labels = [c for c in full.labels if c not in leg_ids]
    internal = RepresentedMatroid.from_matrix(full.select(internal_labels))
    psi = psi_base_expansion(internal)
    phi = None
    if leg_ids:
        if isinstance(source, FeynGraph):
            phi = phi_second(source, dots)
        else:
            table = dots or DotTable(tuple(leg_symbols.get(x, x) for x in leg_ids))
            phi = phi_second(RepresentedMatroid.from_matrix(full), table, legs=leg_ids)
    order = sorted(internal_labels, key=var_key)
    powers = tuple((e, f"nu_{e}", int(shifts.get(e, 0))) for e in order)
    return ParametricIntegrand(psi, phi, powers, tuple(order))


def from_scalar_term(term: ScalarTerm) -> tuple[MomentumSpaceIntegrand, ParametricIntegrand]:
    return (momentum_space(term.host, shifts=term.shifts),
            parametric(term.host, shifts=term.shifts))


def to_document(ms: MomentumSpaceIntegrand, par: ParametricIntegrand | None = None) -> dict:
    """The structured form: deltas, propagators, psi, phi, powers (in that order)."""
    order = list(par.variables) if par else None
    doc = {
        "deltas": [{"terms": [{"momentum": s, "coefficient": c} for s, c in d.coefficients]}
                   for d in ms.deltas],
        "propagators": [{"edge": p.edge, "momentum": p.momentum, "mass2": p.mass2,
                         "power": p.power, "shift": p.shift} for p in ms.propagators],
        "psi": {"terms": par.first.to_json(order) if par else []},
        "phi": {"terms": par.second.to_json(order) if par and par.second is not None else []},
        "powers": [{"edge": e, "base": b, "shift": s}
                   for e, b, s in (par.powers if par else
                                   [(p.edge, p.power, p.shift) for p in ms.propagators])],
        "loops": ms.loops,
    }
    return doc


def to_json(ms: MomentumSpaceIntegrand, par: ParametricIntegrand | None = None) -> str:
    return json.dumps(to_document(ms, par), indent=2) + "\n"


def to_text(ms: MomentumSpaceIntegrand, par: ParametricIntegrand | None = None) -> str:
    lines = [f"loops: {ms.loops}", "deltas:"]
    lines += [f"  {d}" for d in ms.deltas]
    lines.append("propagators:")
    for p in ms.propagators:
        m = f" + {p.mass2}" if p.mass2 else ""
        lines.append(f"  1/({p.momentum}^2{m})^({p.exponent()})")
    if par is not None:
        order = list(par.variables)
        lines.append("psi:")
        lines += [f"  {t}" for t in par.first.to_lines(order)]
        if par.second is not None:
            lines.append("phi:")
            lines += [f"  {t}" for t in par.second.to_lines(order)]
    return "\n".join(lines) + "\n"
