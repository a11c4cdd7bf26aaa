"""Matroids as circuit systems and as represented (matrix) matroids.

Represented matroids are the computational workhorse: bases, circuits,
duals and minors are all read off a labelled full-row-rank matrix.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import DomainError, ElementLookupError, SchemaError, StateError
from .linalg import ExactMatrix, cast_to_field, coerce, det, parse_matrix, rank, rref
from .poly import var_key


@dataclass(frozen=True, eq=False)
class CircuitSystem:
    """A ground set together with a family of circuits."""

    ground: tuple[str, ...]
    circuits: frozenset

    @classmethod
    def build(cls, ground: Iterable[str], circuits: Iterable[Iterable[str]]) -> "CircuitSystem":
        return cls(tuple(ground), frozenset(frozenset(c) for c in circuits))

    def __eq__(self, other):
        if not isinstance(other, CircuitSystem):
            return NotImplemented
        return set(self.ground) == set(other.ground) and self.circuits == other.circuits

    def __hash__(self):
        return hash((frozenset(self.ground), self.circuits))

    def __len__(self):
        return len(self.circuits)

    def __contains__(self, item):
        return frozenset(item) in self.circuits

    def ordered(self) -> list[tuple[str, ...]]:
        """Circuits as tuples in ground order, sorted by size then position."""
        pos = {e: i for i, e in enumerate(self.ground)}
        rows = [tuple(sorted(c, key=pos.__getitem__)) for c in self.circuits]
        return sorted(rows, key=lambda c: (len(c), [pos[e] for e in c]))

    def restrict(self, elements: Iterable[str]) -> "CircuitSystem":
        keep = set(elements)
        return CircuitSystem(tuple(e for e in self.ground if e in keep),
                             frozenset(c for c in self.circuits if c <= keep))


@dataclass(frozen=True)
class CircuitVerdict:
    ok: bool
    axiom: int | None = None
    witness: tuple = ()

    def __bool__(self):
        return self.ok


def validate_circuits(c: CircuitSystem) -> CircuitVerdict:
    """Check the three circuit axioms; report the first failing axiom and its sets."""
    ground = set(c.ground)
    for s in c.circuits:
        if not s:
            return CircuitVerdict(False, 1, (s,))
        if not s <= ground:
            raise DomainError(f"circuit {sorted(s)} is not inside the ground set")
    circuits = sorted(c.circuits, key=lambda s: (len(s), sorted(s, key=var_key)))
    for c1, c2 in itertools.permutations(circuits, 2):
        if c1 < c2:
            return CircuitVerdict(False, 2, (c1, c2))
    for c1, c2 in itertools.combinations(circuits, 2):
        for e in sorted(c1 & c2, key=var_key):
            rest = (c1 | c2) - {e}
            if not any(c3 <= rest for c3 in circuits):
                return CircuitVerdict(False, 3, (c1, c2, e))
    return CircuitVerdict(True)


@dataclass(frozen=True)
class WeightedBase:
    base: frozenset
    weight: Fraction


@dataclass(frozen=True)
class RepresentedMatroid:
    """A full-row-rank labelled matrix viewed as the matroid of its columns."""

    matrix: ExactMatrix

    def __post_init__(self):
        if rank(self.matrix) != self.matrix.nrows:
            raise StateError(
                f"matrix has {self.matrix.nrows} rows but rank {rank(self.matrix)}; "
                "use RepresentedMatroid.from_matrix to drop dependent rows")

    @classmethod
    def from_matrix(cls, m: ExactMatrix) -> "RepresentedMatroid":
        """Keep a maximal independent set of rows (first ones win), entries untouched."""
        kept: list[tuple] = []
        for row in m.rows:
            trial = m.with_rows(kept + [row])
            if rank(trial) == len(kept) + 1:
                kept.append(row)
        return cls(m.with_rows(kept))

    @classmethod
    def from_rows(cls, rows, labels=None, field="Q") -> "RepresentedMatroid":
        return cls.from_matrix(ExactMatrix.from_rows(rows, labels, field))

    @property
    def ground(self) -> tuple[str, ...]:
        return self.matrix.labels

    @property
    def field(self) -> str:
        return self.matrix.field

    @property
    def rank(self) -> int:
        return self.matrix.nrows

    @property
    def nullity(self) -> int:
        return self.matrix.ncols - self.matrix.nrows

    def is_standard(self) -> bool:
        r = self.rank
        one, zero = coerce(1, self.field), coerce(0, self.field)
        return all(self.matrix.rows[i][j] == (one if i == j else zero)
                   for i in range(r) for j in range(r))

    def rank_of(self, elements: Iterable[str]) -> int:
        elements = list(elements)
        if not elements:
            return 0
        return rank(self.matrix.select(elements))

    def __str__(self):
        return format_matroid(self)


def standardize(m: RepresentedMatroid) -> RepresentedMatroid:
    """Row reduce to (I_r | D) on the lexicographically first base (ground order)."""
    red, pivots = rref(m.matrix)
    order = list(pivots) + [j for j in range(red.ncols) if j not in pivots]
    return RepresentedMatroid(red.select(order))


def _check_element(m: RepresentedMatroid, e: str) -> int:
    if e not in m.ground:
        raise ElementLookupError(f"{e!r} is not an element of the matroid")
    return m.ground.index(e)


def dual(m: RepresentedMatroid) -> RepresentedMatroid:
    """(I_n | D) -> (-D^T | I_m); labels stay with their elements."""
    if not m.is_standard():
        raise StateError("dual needs a standard-form representation; call standardize first")
    n = m.rank
    d_block = [row[n:] for row in m.matrix.rows]
    mcols = m.matrix.ncols - n
    one, zero = coerce(1, m.field), coerce(0, m.field)
    rows = []
    for j in range(mcols):
        left = [-d_block[i][j] for i in range(n)]
        right = [one if k == j else zero for k in range(mcols)]
        rows.append(left + right)
    return RepresentedMatroid(ExactMatrix(tuple(tuple(r) for r in rows), m.ground, m.field))


def contract(m: RepresentedMatroid, e: str) -> RepresentedMatroid:
    """M / e. Contracting a loop is the same as deleting it."""
    j = _check_element(m, e)
    rows = [list(r) for r in m.matrix.rows]
    p = next((i for i, r in enumerate(rows) if r[j] != 0), None)
    if p is None:
        return RepresentedMatroid(m.matrix.drop([j]))
    piv = rows[p][j]
    for i, r in enumerate(rows):
        if i != p and r[j] != 0:
            f = r[j] / piv
            rows[i] = [x - f * y for x, y in zip(r, rows[p])]
    del rows[p]
    return RepresentedMatroid(m.matrix.with_rows(rows).drop([j]))


def delete(m: RepresentedMatroid, e: str) -> RepresentedMatroid:
    """M \\ e. Deleting a coloop is the same as contracting it."""
    j = _check_element(m, e)
    rest = m.matrix.drop([j])
    if rank(rest) < m.rank:
        return contract(m, e)
    return RepresentedMatroid(rest)


def _base_walk(matrix: ExactMatrix):
    """Visit every base by single-element pivots from the rref tableau.

    Yields (base as row-ordered column indices, tableau rows, |det ratio|), where
    the det ratio is det(A_B) / det(A_B0) for the starting base B0.
    """
    red, pivots = rref(matrix)
    start = list(pivots)
    tableau = [list(r) for r in red.rows]
    one = coerce(1, matrix.field)
    seen = {frozenset(start)}
    queue = deque([(start, tableau, one)])
    n = matrix.ncols
    while queue:
        base, tab, ratio = queue.popleft()
        yield base, tab, ratio
        in_base = set(base)
        for i in range(len(base)):
            row = tab[i]
            for e in range(n):
                if e in in_base or row[e] == 0:
                    continue
                key = frozenset(in_base - {base[i]} | {e})
                if key in seen:
                    continue
                seen.add(key)
                piv = row[e]
                new_row = [x / piv for x in row]
                new_tab = []
                for k, r in enumerate(tab):
                    if k == i:
                        new_tab.append(new_row)
                    elif r[e] != 0:
                        f = r[e]
                        new_tab.append([x - f * y for x, y in zip(r, new_row)])
                    else:
                        new_tab.append(r)
                new_base = list(base)
                new_base[i] = e
                queue.append((new_base, new_tab, ratio * piv))


def bases(m: RepresentedMatroid | ExactMatrix) -> set[frozenset]:
    """All bases, as sets of labels. Accepts rank-deficient matrices."""
    matrix = m.matrix if isinstance(m, RepresentedMatroid) else m
    labels = matrix.labels
    return {frozenset(labels[j] for j in base) for base, _, _ in _base_walk(matrix)}


def bases_with_weights(m: RepresentedMatroid) -> list[WeightedBase]:
    """Every base with weight det(A_B)^2 (A the representing matrix), in ground order."""
    if m.field != "Q":
        raise DomainError("base weights are defined over Q")
    labels = m.ground
    pos = {e: i for i, e in enumerate(labels)}
    out = []
    d0 = None
    for base, _, ratio in _base_walk(m.matrix):
        if d0 is None:
            d0 = det(m.matrix.select(sorted(base)))
        weight = (d0 * ratio) ** 2
        out.append(WeightedBase(frozenset(labels[j] for j in base), Fraction(weight)))
    out.sort(key=lambda wb: sorted(pos[e] for e in wb.base))
    return out


def circuits_of(m: RepresentedMatroid | ExactMatrix) -> CircuitSystem:
    """Minimal dependent column sets, collected as fundamental circuits of every base."""
    matrix = m.matrix if isinstance(m, RepresentedMatroid) else m
    labels = matrix.labels
    found = set()
    for base, tab, _ in _base_walk(matrix):
        in_base = set(base)
        for e in range(matrix.ncols):
            if e in in_base:
                continue
            circ = {labels[e]} | {labels[base[i]] for i in range(len(base)) if tab[i][e] != 0}
            found.add(frozenset(circ))
    return CircuitSystem(labels, frozenset(found))


def coloops(m: RepresentedMatroid) -> list[str]:
    return [e for e in m.ground if m.rank_of([x for x in m.ground if x != e]) < m.rank]


def is_1pi(m: RepresentedMatroid) -> bool:
    """Bridgeless: every element lies on some circuit (no coloops)."""
    return not coloops(m)


def is_regular_by_binary_test(m: RepresentedMatroid) -> bool:
    """True iff the {-1,0,1} matrix has the same independent sets over Q and GF(2).

    A matroid representable over GF(2) and over a field of characteristic zero
    is regular, so agreement certifies regularity of this representation.
    """
    if m.field != "Q" or not m.matrix.is_signed_unit():
        raise DomainError("binary regularity test needs a {-1,0,1} matrix over Q")
    return bases(m.matrix) == bases(cast_to_field(m.matrix, 2))


def format_matroid(m: RepresentedMatroid, with_circuits: bool = False) -> str:
    """Text record: field tag, labels, matrix block and optionally the circuits."""
    lines = [f"field: {m.field}", "matrix:"]
    lines += ["  " + line for line in str(m.matrix).splitlines()]
    if with_circuits:
        lines.append("circuits:")
        lines += ["  " + " ".join(c) for c in circuits_of(m).ordered()]
    return "\n".join(lines) + "\n"


def parse_matroid(text: str) -> tuple[RepresentedMatroid, CircuitSystem | None]:
    field = "Q"
    section = None
    matrix_lines: list[str] = []
    circuit_lines: list[str] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped.startswith("field:"):
            field = stripped.split(":", 1)[1].strip()
            continue
        if stripped in ("matrix:", "circuits:"):
            section = stripped[:-1]
            continue
        if section == "matrix":
            matrix_lines.append(stripped)
        elif section == "circuits":
            circuit_lines.append(stripped)
        else:
            raise SchemaError(f"unexpected line outside a section: {raw!r}")
    if not matrix_lines:
        raise SchemaError("matroid record has no matrix section")
    m = RepresentedMatroid.from_matrix(parse_matrix("\n".join(matrix_lines), field))
    circuits = None
    if circuit_lines:
        circuits = CircuitSystem.build(m.ground, (c.split() for c in circuit_lines))
    return m, circuits


def same_matroid(a: RepresentedMatroid | ExactMatrix, b: RepresentedMatroid | ExactMatrix) -> bool:
    """Labelled equality, tested through the circuit systems."""
    return circuits_of(a) == circuits_of(b)

