"""Tensor reduction: numerator dot products become matroid coextensions.

A graph is first row reduced to (I | C) using only combinations of two rows
that keep every entry in {-1, 0, 1}. Each dot pair (e1, e2) then adds one
element f with momentum alpha*k_e1 + beta*k_e2 and one row, keeping the form

    ( I  0  C )
    ( 0  I  D )

with C and D in {-1, 0, 1}. The dot product is finally traded for inverse
propagators via  2 k_e.k_j = D_e + D_j - D_f - m_e^2 - m_j^2 + m_f^2  (for
k_f = k_e - k_j), which shifts propagator powers by integers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import ConsistencyError, DomainError, IntegrityError, StateError
from .graph import FeynGraph, Momentum, Routing, incidence_matrix, leg_columns, route_momenta
from .linalg import ExactMatrix, nullspace
from .matroid import CircuitSystem, RepresentedMatroid, circuits_of, contract
from .poly import Poly


def safe_combine(r1: Sequence[int], r2: Sequence[int], i: int) -> list[int]:
    """r1 -/+ r2 with a zero in column i; every entry must stay in {-1, 0, 1}.

    For a {-1,0,1} matrix representing the same matroid over Q and GF(2) the
    result is always in range; an entry of magnitude 2 exposes a 2x2 minor of
    determinant +-2, i.e. a U(2,4) minor, and raises IntegrityError.
    """
    if len(r1) != len(r2):
        raise DomainError("rows have different lengths")
    if any(x not in (-1, 0, 1) for x in itertools.chain(r1, r2)):
        raise DomainError("rows must have entries in {-1, 0, 1}")
    if r1[i] == 0 or r2[i] == 0:
        raise DomainError(f"both rows need a nonzero entry in column {i}")
    f = r1[i] * r2[i]
    out = [a - f * b for a, b in zip(r1, r2)]
    for j, x in enumerate(out):
        if x not in (-1, 0, 1):
            raise IntegrityError(
                f"combination has entry {x} in column {j}: columns {i} and {j} of the two rows "
                "form a 2x2 minor of determinant +-2 (a U(2,4) minor)")
    return out


@dataclass
class _Block:
    """Working state (I 0 C / 0 I D), plus optional leg columns and conservation rows."""

    basis: list[str]          # graph identity columns, one per graph row
    new: list[str]            # new-element identity columns, one per new row
    rest: list[str]           # C / D columns
    legs: list[str]
    rows: list[dict]          # graph rows then new rows
    conservation: list[dict] = field(default_factory=list)

    def copy(self) -> "_Block":
        return _Block(list(self.basis), list(self.new), list(self.rest), list(self.legs),
                      [dict(r) for r in self.rows], [dict(r) for r in self.conservation])

    @property
    def internal(self) -> list[str]:
        return self.basis + self.new + self.rest

    def internal_matrix(self) -> ExactMatrix:
        cols = self.internal
        return ExactMatrix.from_rows([[r.get(c, 0) for c in cols] for r in self.rows], cols)

    def full_matrix(self) -> ExactMatrix:
        cols = self.internal + self.legs
        rows = [[r.get(c, 0) for c in cols] for r in self.rows + self.conservation]
        return ExactMatrix.from_rows(rows, cols)

    def pivot_row(self, label: str) -> int:
        return self.basis.index(label)

    def vector(self, row: dict) -> list[int]:
        return [row.get(c, 0) for c in self.internal + self.legs]

    def as_row(self, values: Sequence[int]) -> dict:
        return {c: v for c, v in zip(self.internal + self.legs, values) if v}


def _row_lists(m: ExactMatrix) -> list[list[int]]:
    rows = m.integer_rows()
    if any(x not in (-1, 0, 1) for r in rows for x in r):
        raise DomainError("normalization needs a matrix with entries in {-1, 0, 1}")
    return rows


def _normalize(m: ExactMatrix, internal: Sequence[str], legs: Sequence[str],
               avoid: Iterable[str] = ()) -> _Block:
    """Gauss-Jordan on the internal columns using safe combinations only.

    Columns are scanned left to right except that labels in `avoid` are
    scanned last, so they end up outside the identity block when possible.
    """
    rows = _row_lists(m)
    labels = list(m.labels)
    avoid = set(avoid)
    order = [c for c in internal if c not in avoid] + [c for c in internal if c in avoid]
    used: list[int] = []
    pivots: list[str] = []
    for lab in order:
        col = labels.index(lab)
        src = next((i for i in range(len(rows)) if i not in used and rows[i][col]), None)
        if src is None:
            continue
        if rows[src][col] < 0:
            rows[src] = [-x for x in rows[src]]
        for i in range(len(rows)):
            if i != src and rows[i][col]:
                rows[i] = safe_combine(rows[i], rows[src], col)
        used.append(src)
        pivots.append(lab)
    block = _Block(pivots, [], [c for c in internal if c not in pivots], list(legs), [])
    for i in used:
        block.rows.append({c: v for c, v in zip(labels, rows[i]) if v})
    internal_set = set(internal)
    for i in range(len(rows)):
        if i in used:
            continue
        row = {c: v for c, v in zip(labels, rows[i]) if v}
        if any(c in internal_set for c in row):
            raise IntegrityError("row reduction left a non-pivot row with internal entries")
        if row and legs:
            lead = next(row[c] for c in legs if c in row)
            if lead < 0:
                row = {c: -v for c, v in row.items()}
            block.conservation.append(row)
    return block


def _graph_block(g: FeynGraph, include_legs: bool, avoid: Iterable[str] = ()) -> _Block:
    inc = incidence_matrix(g)
    internal = list(inc.labels)
    if include_legs and g.externals:
        lc = leg_columns(g)
        inc = ExactMatrix(tuple(a + b for a, b in zip(inc.rows, lc.rows)), inc.labels + lc.labels)
        return _normalize(inc, internal, list(lc.labels), avoid)
    return _normalize(inc, internal, [], avoid)


def normalize_to_IC(g: FeynGraph | ExactMatrix) -> ExactMatrix:
    """Row reduce a graph's incidence matrix (or a {-1,0,1} matrix) to (I | C).

    Only safe two-row combinations and row negations are used, so the result
    represents the same matroid over Q and GF(2). Zero rows are removed and
    the identity columns are moved to the front.
    """
    if isinstance(g, FeynGraph):
        return _graph_block(g, include_legs=False).internal_matrix()
    return _normalize(g, list(g.labels), []).internal_matrix()


@dataclass(frozen=True)
class DotPair:
    """Two edges whose momenta are dotted in the numerator.

    The new element gets momentum proportional to k_first - k_second (or
    k_first + k_second with `flip`) wherever the construction leaves the sign
    free. `label` names the new element.
    """

    first: str
    second: str
    label: str | None = None
    flip: bool = False

    @classmethod
    def parse(cls, text: str, flip: bool = False) -> "DotPair":
        body, _, label = text.partition("=")
        a, sep, b = body.partition(":")
        if not sep or not a.strip() or not b.strip():
            raise DomainError(f"pair {text!r} is not of the form e1:e2 or e1:e2=name")
        return cls(a.strip(), b.strip(), label.strip() or None, flip)

    @property
    def key(self) -> frozenset:
        return frozenset((self.first, self.second))

    def __str__(self):
        return f"{self.first}:{self.second}"


def _as_pair(p) -> DotPair:
    if isinstance(p, DotPair):
        return p
    if isinstance(p, str):
        return DotPair.parse(p)
    return DotPair(*p)


@dataclass(frozen=True)
class Coextension:
    """How one new element was added."""

    label: str
    pair: tuple[str, str]
    alpha: Fraction      # k_label = alpha * k_pair[0] + beta * k_pair[1]
    beta: Fraction
    case: int            # 1: both in C, 2: one in I, 3: both in I


def _coextend(block: _Block, i: str, j: str, sign: int, label: str) -> tuple[_Block, Coextension]:
    if i == j:
        raise DomainError("a pair with equal edges is never coextended")
    for e in (i, j):
        if e not in block.basis and e not in block.rest:
            raise DomainError(f"{e!r} is not a column of the block matrix")
    if label in block.internal or label in block.legs:
        raise DomainError(f"label {label!r} is already in use")
    out = block.copy()
    out.rest = list(block.rest)
    out.new = block.new + [label]
    in_i, in_j = i in block.basis, j in block.basis
    swapped = False
    if in_j and not in_i:
        i, j, swapped = j, i, True
        in_i, in_j = True, False
    v: dict[str, int] = {}
    if not in_i:
        case = 1
        v = {i: -1, j: sign}
        new_row = {label: 1, i: -1, j: sign}
    elif not in_j:
        case = 2
        row_i = block.rows[block.pivot_row(i)]
        eps = row_i.get(j, 0)
        v = {i: -1, j: -eps if eps else sign}
        a_prime = {label: 1, **v}
        new_row = _add(a_prime, row_i, 1)
    else:
        case = 3
        row_i = block.rows[block.pivot_row(i)]
        row_j = block.rows[block.pivot_row(j)]
        shared = next((c for c in block.rest if row_i.get(c) and row_j.get(c)), None)
        if shared is not None:
            v = {i: row_i[shared], j: -row_j[shared]}
        else:
            v = {i: -1, j: sign}
        new_row = {label: 1, **v}
        new_row = _add(new_row, row_i, -v[i])
        new_row = _add(new_row, row_j, -v[j])
    # k_label = -(v_i k_i + v_j k_j), read off the row before clearing
    alpha, beta = Fraction(-v[i]), Fraction(-v[j])
    for c, x in new_row.items():
        if x not in (-1, 0, 1):
            raise IntegrityError(f"coextension produced entry {x} in column {c!r}")
    if any(c in block.basis or (c in block.new) for c in new_row):
        raise IntegrityError("coextension row was not cleared on the identity block")
    lead = next((new_row[c] for c in block.rest if new_row.get(c)), 1)
    if lead < 0:
        new_row = {c: -x for c, x in new_row.items()}
        new_row[label] = 1
        alpha, beta = -alpha, -beta
    out.rows.append(new_row)
    if swapped:
        alpha, beta = beta, alpha
        i, j = j, i
    return out, Coextension(label, (i, j), alpha, beta, case)


def _add(row: dict, other: dict, factor: int) -> dict:
    out = dict(row)
    for c, x in other.items():
        val = out.get(c, 0) + factor * x
        if val:
            out[c] = val
        else:
            out.pop(c, None)
    return out


def _block_from_matrix(m: ExactMatrix) -> _Block:
    rows = m.integer_rows()
    n = m.nrows
    basis = []
    for t in range(n):
        unit = next((c for c, lab in enumerate(m.labels)
                     if rows[t][c] == 1 and all(rows[s][c] == 0 for s in range(n) if s != t)), None)
        if unit is None:
            raise StateError(f"row {t} has no identity column; the matrix is not in block form")
        basis.append(m.labels[unit])
    rest = [c for c in m.labels if c not in basis]
    block = _Block(basis, [], rest, [], [])
    for r in rows:
        block.rows.append({c: v for c, v in zip(m.labels, r) if v})
    return block


def coextend_pair(m: ExactMatrix, i: str, j: str, *, sign: int = 1,
                  label: str = "n1") -> tuple[ExactMatrix, Coextension]:
    """Add one element f and one row to a block matrix (I 0 C / 0 I D).

    i and j label columns of the matrix. When the construction leaves the sign
    free, f gets momentum proportional to k_i - sign * k_j. The new column is
    placed right after the identity block and the new row at the bottom.
    """
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    block = _block_from_matrix(m)
    out, info = _coextend(block, i, j, sign, label)
    return out.internal_matrix(), info


def reduce_matrix(m: ExactMatrix, pairs: Sequence = ()) -> tuple[ExactMatrix, list[Coextension]]:
    """normalize_to_IC followed by one coextension per pair, for a bare {-1,0,1} matrix.

    No momenta are known here, so no pair is treated as redundant.
    """
    pairs = [_as_pair(p) for p in pairs]
    block = _normalize(m, list(m.labels), [], [e for p in pairs for e in (p.first, p.second)])
    taken = set(m.labels) | {p.label for p in pairs if p.label}
    counter = [0]
    done = []
    for p in pairs:
        label = p.label or _fresh_label(taken, counter)
        taken.add(label)
        block, info = _coextend(block, p.first, p.second, -1 if p.flip else 1, label)
        done.append(info)
    return block.internal_matrix(), done


@dataclass(frozen=True)
class Redundancy:
    """k_witness = alpha * k_first + beta * k_second."""

    witness: str
    alpha: Fraction
    beta: Fraction
    parallel: bool = False   # the two momenta are proportional (includes e1 == e2)


def _coords(k: Momentum, symbols: Sequence[str]) -> list[Fraction]:
    d = k.as_dict()
    return [d.get(s, Fraction(0)) for s in symbols]


def _solve_two(k1: Momentum, k2: Momentum, kx: Momentum) -> tuple[Fraction, Fraction] | None:
    symbols = sorted({s for k in (k1, k2, kx) for s, _ in k.coeffs})
    u, v, w = (_coords(k, symbols) for k in (k1, k2, kx))
    for p, q in itertools.combinations(range(len(symbols)), 2):
        d = u[p] * v[q] - u[q] * v[p]
        if d:
            alpha = (w[p] * v[q] - w[q] * v[p]) / d
            beta = (u[p] * w[q] - u[q] * w[p]) / d
            if all(alpha * a + beta * b == c for a, b, c in zip(u, v, w)):
                return alpha, beta
            return None
    return None


def _ratio(k1: Momentum, k2: Momentum) -> Fraction | None:
    """c with k2 = c * k1, if it exists (k1 nonzero)."""
    d1, d2 = k1.as_dict(), k2.as_dict()
    s = next(iter(d1))
    c = d2.get(s, Fraction(0)) / d1[s]
    return c if k2 == k1 * c else None


def pair_redundant(g: FeynGraph, routing: Routing, p, existing: Mapping[str, Momentum] | None = None
                   ) -> Redundancy | None:
    """Find an element whose momentum already combines the pair with both weights nonzero.

    Graph edges are searched first in edge order, then the elements of
    `existing` in their order. Equal or proportional momenta return the first
    edge itself.
    """
    p = _as_pair(p)
    for e in (p.first, p.second):
        if e not in routing.momenta:
            raise DomainError(f"pair {p} names unknown edge {e!r}")
    k1, k2 = routing[p.first], routing[p.second]
    if not k1 or not k2:
        return Redundancy(p.first, Fraction(1), Fraction(0), parallel=True)
    c = _ratio(k1, k2)
    if c is not None:
        # k1 = (1/2) k1 + (1/(2c)) k2
        return Redundancy(p.first, Fraction(1, 2), 1 / (2 * c), parallel=True)
    candidates = [(e.id, routing[e.id]) for e in g.edges]
    candidates += list((existing or {}).items())
    for name, kx in candidates:
        if name in (p.first, p.second):
            continue
        sol = _solve_two(k1, k2, kx)
        if sol and sol[0] and sol[1]:
            return Redundancy(name, sol[0], sol[1])
    return None


@dataclass(frozen=True)
class NewElement:
    label: str
    momentum: Momentum
    pair: tuple[str, str]
    alpha: Fraction
    beta: Fraction
    case: int


@dataclass(frozen=True)
class DiscardedPair:
    pair: tuple[str, str]
    witness: str
    alpha: Fraction
    beta: Fraction
    parallel: bool


@dataclass(frozen=True)
class ReducedForm:
    """Result of reducing a graph with dot pairs.

    `matrix` is the internal block (I 0 C / 0 I D) with columns ordered as
    graph identity columns, new elements, then the remaining graph edges.
    With legs enabled, `legs` holds the external columns for the same rows
    followed by momentum-conservation rows (whose internal part is zero).
    """

    graph: FeynGraph
    graph_rank: int
    matrix: ExactMatrix
    legs: ExactMatrix | None
    new_elements: tuple[NewElement, ...]
    discarded: tuple[DiscardedPair, ...]
    routing: Routing
    pairs: tuple[DotPair, ...]
    notes: tuple[str, ...] = ()

    @property
    def r(self) -> int:
        return len(self.new_elements)

    @property
    def new_labels(self) -> tuple[str, ...]:
        return tuple(x.label for x in self.new_elements)

    @property
    def internal_labels(self) -> tuple[str, ...]:
        return self.matrix.labels

    def matroid(self) -> RepresentedMatroid:
        return RepresentedMatroid(self.matrix)

    def full_matrix(self) -> ExactMatrix:
        """Internal and leg columns side by side, conservation rows at the bottom."""
        if self.legs is None:
            return self.matrix
        n = self.matrix.ncols
        rows = [list(a) + list(b) for a, b in zip(self.matrix.rows, self.legs.rows)]
        for extra in self.legs.rows[self.matrix.nrows:]:
            rows.append([0] * n + list(extra))
        return ExactMatrix.from_rows(rows, self.matrix.labels + self.legs.labels)

    def block_C(self) -> ExactMatrix:
        k = self.graph_rank
        rest = self.matrix.labels[k + self.r:]
        return self.matrix.select(rest).with_rows(self.matrix.select(rest).rows[:k])

    def block_D(self) -> ExactMatrix:
        k = self.graph_rank
        rest = self.matrix.labels[k + self.r:]
        return self.matrix.select(rest).with_rows(self.matrix.select(rest).rows[k:])

    def graph_block(self) -> ExactMatrix:
        """(I_rkG | C) on the graph edges alone."""
        k = self.graph_rank
        cols = self.matrix.labels[:k] + self.matrix.labels[k + self.r:]
        return self.matrix.select(cols).with_rows(self.matrix.select(cols).rows[:k])

    def momenta(self) -> dict[str, Momentum]:
        out = dict(self.routing.momenta)
        out.update({x.label: x.momentum for x in self.new_elements})
        return out

    def contract_new(self) -> RepresentedMatroid:
        m = self.matroid()
        for lab in self.new_labels:
            m = contract(m, lab)
        return m

    def is_block_form(self) -> bool:
        k, r = self.graph_rank, self.r
        n = k + r
        rows = self.matrix.rows
        for t in range(n):
            for c in range(n):
                if rows[t][c] != (1 if t == c else 0):
                    return False
        return all(x in (-1, 0, 1) for row in rows for x in row[n:])


def _fresh_label(taken: set[str], counter: list[int]) -> str:
    while True:
        counter[0] += 1
        name = f"n{counter[0]}"
        if name not in taken:
            return name


def reduce_graph(g: FeynGraph, pairs: Sequence = (), *, include_legs: bool = False,
                 check_circuits: bool = True) -> ReducedForm:
    """Normalize to (I | C) and coextend once per non-redundant dot pair.

    Edges named in pairs are kept out of the identity block when possible so
    that the simplest coextension case applies. With `check_circuits`, each
    coextension's circuits are recomputed from the old circuits and compared
    with a direct enumeration.
    """
    pairs = tuple(_as_pair(p) for p in pairs)
    edge_ids = set(g.edge_ids)
    for p in pairs:
        for e in (p.first, p.second):
            if e not in edge_ids:
                raise DomainError(f"pair {p} names unknown edge {e!r}")
    routing = route_momenta(g)
    avoid = [e for p in pairs for e in (p.first, p.second)]
    block = _graph_block(g, include_legs, avoid)
    graph_rank = len(block.basis)
    taken = set(g.edge_ids) | {leg.id for leg in g.externals}
    taken |= {p.label for p in pairs if p.label}
    counter = [0]
    new_elements: list[NewElement] = []
    discarded: list[DiscardedPair] = []
    notes: list[str] = []
    for p in pairs:
        existing = {x.label: x.momentum for x in new_elements}
        red = pair_redundant(g, routing, p, existing)
        if red is not None:
            discarded.append(DiscardedPair((p.first, p.second), red.witness, red.alpha, red.beta,
                                           red.parallel))
            continue
        label = p.label or _fresh_label(taken, counter)
        taken.add(label)
        before = block
        block, info = _coextend(block, p.first, p.second, -1 if p.flip else 1, label)
        k = routing[p.first] * info.alpha + routing[p.second] * info.beta
        new_elements.append(NewElement(label, k, info.pair, info.alpha, info.beta, info.case))
        if check_circuits:
            circuits_after_coextension(before.internal_matrix(),
                                       {p.first: info.alpha, p.second: info.beta}, label,
                                       check=block.internal_matrix())
        if not any(k.as_dict().get(s) for s in routing.loops):
            notes.append(f"{label} carries no loop momentum and is a coloop")
    legs = None
    if include_legs and block.legs:
        lrows = [[r.get(c, 0) for c in block.legs] for r in block.rows + block.conservation]
        legs = ExactMatrix.from_rows(lrows, block.legs)
    return ReducedForm(g, graph_rank, block.internal_matrix(), legs, tuple(new_elements),
                       tuple(discarded), routing, pairs, tuple(notes))


def circuits_after_coextension(matrix: ExactMatrix, functional: Mapping[str, object],
                               new_label: str, *, check: ExactMatrix | None = None
                               ) -> CircuitSystem:
    """Circuits after adding an element whose momentum is sum(functional[e] * k_e).

    A circuit C with kernel vector c gains the new element iff the functional
    is nonzero on c. Further circuits avoiding the new element are unions of
    two gaining circuits with the new element removed; only minimal sets are
    kept. With `check`, the result is compared to a direct enumeration on the
    coextended matrix and IntegrityError is raised on disagreement.
    """
    lam = {e: Fraction(v) for e, v in functional.items()}
    original = circuits_of(matrix)
    gaining, kept = [], []
    for circ in original.circuits:
        sub = matrix.select([e for e in matrix.labels if e in circ])
        (vec,) = nullspace(sub)
        value = sum(lam.get(lab, 0) * Fraction(x) for lab, x in zip(sub.labels, vec))
        (gaining if value else kept).append(circ)
    candidates = set(kept) | {c | {new_label} for c in gaining}
    for c1, c2 in itertools.combinations(gaining, 2):
        candidates.add(c1 | c2)
    minimal = {c for c in candidates if not any(d < c for d in candidates)}
    result = CircuitSystem(tuple(matrix.labels) + (new_label,), frozenset(minimal))
    if check is not None:
        direct = circuits_of(check)
        if set(direct.circuits) != set(result.circuits):
            raise IntegrityError(
                f"circuit completion disagrees with enumeration: "
                f"missing {sorted(map(sorted, direct.circuits - result.circuits))}, "
                f"extra {sorted(map(sorted, result.circuits - direct.circuits))}")
    return result


@dataclass(frozen=True)
class ExpansionTerm:
    """coefficient * D_propagator, or coefficient * mass2 when propagator is None."""

    coefficient: Fraction
    propagator: str | None = None
    mass2: str | None = None


def expand_dot_product(e: str, j: str, f: str | None = None, *, alpha=1, beta=-1,
                       masses: Mapping[str, str | None] | None = None,
                       momenta: Mapping[str, Momentum] | None = None) -> list[ExpansionTerm]:
    """k_e . k_j in inverse propagators D_x = k_x^2 + m_x^2.

    With k_f = alpha k_e + beta k_j,
        k_e.k_j = (D_f - m_f^2 - alpha^2 (D_e - m_e^2) - beta^2 (D_j - m_j^2)) / (2 alpha beta).
    For e == j (no f needed) it is D_e - m_e^2. If `momenta` is given the
    relation for k_f is verified first.
    """
    masses = masses or {}
    if e == j:
        terms = [ExpansionTerm(Fraction(1), e)]
        if masses.get(e):
            terms.append(ExpansionTerm(Fraction(-1), None, masses[e]))
        return terms
    if f is None:
        raise DomainError("a third element f with k_f = alpha k_e + beta k_j is needed")
    alpha, beta = Fraction(alpha), Fraction(beta)
    if not alpha or not beta:
        raise DomainError("both weights of k_f must be nonzero")
    if momenta is not None:
        if momenta[f] != momenta[e] * alpha + momenta[j] * beta:
            raise ConsistencyError(
                f"k_{f} = {momenta[f]} is not {alpha}*k_{e} + {beta}*k_{j}")
    scale = 1 / (2 * alpha * beta)
    terms = []
    for x, w in ((e, -alpha * alpha), (j, -beta * beta), (f, Fraction(1))):
        terms.append(ExpansionTerm(w * scale, x))
    for x, w in ((e, -alpha * alpha), (j, -beta * beta), (f, Fraction(1))):
        if masses.get(x):
            terms.append(ExpansionTerm(-w * scale, None, masses[x]))
    return terms


@dataclass(frozen=True)
class ScalarTerm:
    """coefficient * mass_factor * scalar integral with powers nu_e + shift_e."""

    coefficient: Fraction
    power_shift: tuple[tuple[str, int], ...]
    mass_factor: Poly
    host: ReducedForm = field(compare=False, repr=False, default=None)

    @property
    def shifts(self) -> dict[str, int]:
        return dict(self.power_shift)

    @property
    def active(self) -> tuple[str, ...]:
        return self.host.internal_labels if self.host else ()

    def powers(self, base: Mapping[str, str] | None = None) -> list[tuple[str, str, int]]:
        base = base or {}
        shifts = self.shifts
        order = sorted(self.host.internal_labels, key=_label_order(self.host)) if self.host else []
        return [(e, base.get(e, f"nu_{e}"), shifts.get(e, 0)) for e in order]


def _label_order(rf: ReducedForm):
    pos = {e: i for i, e in enumerate(rf.graph.edge_ids + rf.new_labels)}
    return lambda e: pos.get(e, len(pos))


def _dot_expansion(rf: ReducedForm, p: DotPair) -> list[ExpansionTerm]:
    masses = rf.graph.masses()
    if p.first == p.second:
        return expand_dot_product(p.first, p.second, masses=masses)
    momenta = rf.momenta()
    made = next((x for x in rf.new_elements if {x.pair[0], x.pair[1]} == p.key), None)
    if made is not None:
        a, b = made.alpha, made.beta
        if made.pair[0] != p.first:
            a, b = b, a
        return expand_dot_product(p.first, p.second, made.label, alpha=a, beta=b,
                                  masses=masses, momenta=momenta)
    existing = {x.label: x.momentum for x in rf.new_elements}
    red = pair_redundant(rf.graph, rf.routing, p, existing)
    if red is None:
        raise StateError(f"pair {p} was neither coextended nor found redundant")
    if red.parallel:
        if not red.alpha or not red.beta:
            return []
        c = 1 / (2 * red.beta)   # k_second = c * k_first
        return [ExpansionTerm(t.coefficient * c, t.propagator, t.mass2)
                for t in expand_dot_product(p.first, p.first, masses=masses)]
    return expand_dot_product(p.first, p.second, red.witness, alpha=red.alpha, beta=red.beta,
                              masses=masses, momenta=momenta)


def scalarize(g: FeynGraph, numerator: Sequence = (), *, coefficient=1,
              include_legs: bool = False) -> list[ScalarTerm]:
    """Rewrite coefficient * prod(k_e1 . k_e2) / prod D_e^nu_e as scalar integrals.

    All terms share one host ReducedForm; each D_x factor from the expansion
    lowers the power of x by one. Terms with equal shifts and mass factor are
    merged and zero terms dropped.
    """
    pairs = tuple(_as_pair(p) for p in numerator)
    rf = reduce_graph(g, pairs, include_legs=include_legs)
    acc: dict[tuple, Fraction] = {((), ()): Fraction(coefficient)}
    for p in pairs:
        nxt: dict[tuple, Fraction] = {}
        for (shift, mass), c in acc.items():
            for t in _dot_expansion(rf, p):
                sh = dict(shift)
                ms = dict(mass)
                if t.propagator is not None:
                    sh[t.propagator] = sh.get(t.propagator, 0) - 1
                else:
                    ms[t.mass2] = ms.get(t.mass2, 0) + 1
                key = (tuple(sorted(sh.items(), key=lambda kv: _label_order(rf)(kv[0]))),
                       tuple(sorted(ms.items())))
                nxt[key] = nxt.get(key, 0) + c * t.coefficient
        acc = nxt
    terms = []
    for (shift, mass), c in acc.items():
        if c:
            terms.append(ScalarTerm(c, shift, Poly.monomial(dict(mass)), rf))
    order = _label_order(rf)
    terms.sort(key=lambda t: (len(t.mass_factor.variables()), [(order(e), s) for e, s in t.power_shift],
                              str(t.mass_factor)))
    return terms
