"""Exact dense linear algebra over Q and the prime fields GF(2), GF(3).

Matrices are immutable and carry a label for every column, because columns are
matroid elements (edges) and every later stage refers to them by name.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import DimensionError, DomainError, SchemaError

FIELDS = ("Q", "GF2", "GF3")
_PRIMES = {"GF2": 2, "GF3": 3}


class Mod:
    """Residue class modulo a small prime."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        self.p = p
        self.value = int(value) % p

    def _lift(self, other):
        if isinstance(other, Mod):
            if other.p != self.p:
                raise DomainError(f"mixing GF({self.p}) and GF({other.p})")
            return other
        if isinstance(other, Fraction):
            if other.denominator != 1:
                return Mod(other.numerator, self.p) / Mod(other.denominator, self.p)
            other = other.numerator
        if isinstance(other, int):
            return Mod(other, self.p)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return Mod(self.value + other.value, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return Mod(self.value - other.value, self.p)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return Mod(self.value * other.value, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if other.value == 0:
            raise ZeroDivisionError(f"division by zero in GF({self.p})")
        return Mod(self.value * pow(other.value, -1, self.p), self.p)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __neg__(self):
        return Mod(-self.value, self.p)

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return False
        return self.value == other.value

    def __hash__(self):
        return hash((self.value, self.p))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"Mod({self.value}, {self.p})"

    def __str__(self):
        return str(self.value)


def field_prime(field: str) -> int | None:
    """Characteristic of a field tag, or None for Q."""
    if field not in FIELDS:
        raise DomainError(f"unknown field {field!r}; expected one of {FIELDS}")
    return _PRIMES.get(field)


def coerce(value, field: str):
    """Convert an int / Fraction / string literal into a scalar of `field`."""
    if isinstance(value, str):
        value = Fraction(value)
    p = field_prime(field)
    if p is None:
        if isinstance(value, Mod):
            raise DomainError("cannot lift a finite field element to Q")
        return Fraction(value)
    if isinstance(value, Mod):
        if value.p != p:
            raise DomainError(f"GF({value.p}) entry in a {field} matrix")
        return value
    value = Fraction(value)
    return Mod(value.numerator, p) / Mod(value.denominator, p)


def _exact_div(a, b):
    if isinstance(a, int) and isinstance(b, int):
        q, r = divmod(a, b)
        if r:
            raise ArithmeticError(f"{a} is not divisible by {b}")
        return q
    return a / b


def _is_zero(x) -> bool:
    return x == 0


def bareiss_det(rows: Sequence[Sequence], *, complete_pivoting: bool = False,
                cost: Callable | None = None):
    """Fraction-free determinant of a square array of ring elements.

    The ring needs +, -, * and an exact `/` (ints use floor division, which is
    exact at every Bareiss step). With `complete_pivoting` the pivot is the
    nonzero entry minimising `cost`, which keeps polynomial entries small.
    """
    a = [list(r) for r in rows]
    n = len(a)
    if any(len(r) != n for r in a):
        raise DimensionError(f"determinant of a non-square {n}x{len(a[0]) if a else 0} array")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if complete_pivoting:
            best = None
            for i in range(k, n):
                for j in range(k, n):
                    if not _is_zero(a[i][j]):
                        c = cost(a[i][j]) if cost else 0
                        if best is None or c < best[0]:
                            best = (c, i, j)
            if best is None:
                return 0
            _, pi, pj = best
            if pj != k:
                for row in a:
                    row[k], row[pj] = row[pj], row[k]
                sign = -sign
        else:
            pi = next((i for i in range(k, n) if not _is_zero(a[i][k])), None)
            if pi is None:
                return 0
        if pi != k:
            a[k], a[pi] = a[pi], a[k]
            sign = -sign
        pivot = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = _exact_div(row_i[j] * pivot - aik * row_k[j], prev)
            row_i[k] = 0
        prev = pivot
    result = a[n - 1][n - 1]
    return -result if sign < 0 else result


@dataclass(frozen=True)
class ExactMatrix:
    """Row-major matrix over Q or GF(p) with one label per column."""

    rows: tuple[tuple, ...]
    labels: tuple[str, ...]
    field: str = "Q"

    def __post_init__(self):
        field_prime(self.field)
        width = len(self.labels)
        for r in self.rows:
            if len(r) != width:
                raise DimensionError(
                    f"row of length {len(r)} in a matrix with {width} labelled columns")
        if len(set(self.labels)) != width:
            raise DomainError(f"column labels are not distinct: {self.labels}")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable], labels: Sequence[str] | None = None,
                  field: str = "Q") -> "ExactMatrix":
        grid = tuple(tuple(coerce(x, field) for x in r) for r in rows)
        if labels is None:
            width = len(grid[0]) if grid else 0
            labels = [f"c{j + 1}" for j in range(width)]
        return cls(grid, tuple(str(x) for x in labels), field)

    @classmethod
    def identity(cls, n: int, labels: Sequence[str] | None = None, field: str = "Q"):
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], labels, field)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.labels)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise DomainError(f"no column labelled {label!r}") from None

    def column(self, key) -> tuple:
        j = self.index(key) if isinstance(key, str) else key
        return tuple(r[j] for r in self.rows)

    def select(self, keys: Iterable) -> "ExactMatrix":
        """Columns in the given order (labels or indices)."""
        idx = [self.index(k) if isinstance(k, str) else k for k in keys]
        return ExactMatrix(tuple(tuple(r[j] for j in idx) for r in self.rows),
                           tuple(self.labels[j] for j in idx), self.field)

    def drop(self, keys: Iterable) -> "ExactMatrix":
        gone = {self.index(k) if isinstance(k, str) else k for k in keys}
        return self.select([j for j in range(self.ncols) if j not in gone])

    def with_rows(self, rows: Iterable[Iterable]) -> "ExactMatrix":
        return ExactMatrix(tuple(tuple(r) for r in rows), self.labels, self.field)

    def relabel(self, labels: Sequence[str]) -> "ExactMatrix":
        return ExactMatrix(self.rows, tuple(labels), self.field)

    def is_signed_unit(self) -> bool:
        """True if every entry is -1, 0 or 1 (only meaningful over Q)."""
        return all(x in (-1, 0, 1) for r in self.rows for x in r)

    def integer_rows(self) -> list[list[int]]:
        if self.field != "Q":
            return [[int(x) for x in r] for r in self.rows]
        out = []
        for r in self.rows:
            if any(x.denominator != 1 for x in r):
                raise DomainError("matrix has non-integral entries")
            out.append([x.numerator for x in r])
        return out

    def __str__(self) -> str:
        return format_matrix(self)


def _grid_for_det(m: ExactMatrix):
    if m.field == "Q" and all(x.denominator == 1 for r in m.rows for x in r):
        return [[x.numerator for x in r] for r in m.rows], True
    return [list(r) for r in m.rows], False


def det(m: ExactMatrix):
    """Exact determinant of a square matrix (Fraction over Q, Mod over GF(p))."""
    if m.nrows != m.ncols:
        raise DimensionError(f"determinant of a non-square {m.nrows}x{m.ncols} matrix")
    grid, integral = _grid_for_det(m)
    value = bareiss_det(grid)
    return coerce(value, m.field) if integral or isinstance(value, int) else value


def rref(m: ExactMatrix) -> tuple[ExactMatrix, tuple[int, ...]]:
    """Reduced row echelon form with zero rows removed, plus pivot column indices.

    Pivots are found scanning columns left to right; the pivot row is the
    lowest-index not-yet-used row with a nonzero entry. Columns never move.
    """
    a = [list(r) for r in m.rows]
    nr, nc = len(a), m.ncols
    pivots = []
    top = 0
    for col in range(nc):
        if top == nr:
            break
        src = next((i for i in range(top, nr) if a[i][col] != 0), None)
        if src is None:
            continue
        a[top], a[src] = a[src], a[top]
        piv = a[top][col]
        if piv != 1:
            a[top] = [x / piv for x in a[top]]
        for i in range(nr):
            if i != top and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[top])]
        pivots.append(col)
        top += 1
    return m.with_rows(a[:top]), tuple(pivots)


def rank(m: ExactMatrix) -> int:
    return len(rref(m)[1])


def nullspace(m: ExactMatrix) -> list[tuple]:
    """Basis of {x : m x = 0}, one vector per non-pivot column (that entry is 1)."""
    red, pivots = rref(m)
    one = coerce(1, m.field)
    zero = coerce(0, m.field)
    basis = []
    for f in range(m.ncols):
        if f in pivots:
            continue
        v = [zero] * m.ncols
        v[f] = one
        for i, p in enumerate(pivots):
            v[p] = -red.rows[i][f]
        basis.append(tuple(v))
    return basis


@dataclass(frozen=True)
class TUVerdict:
    """Outcome of a total-unimodularity test; the witness is set when `ok` is False."""

    ok: bool
    rows: tuple[int, ...] = ()
    columns: tuple[str, ...] = ()
    value: Fraction | None = None

    def __bool__(self):
        return self.ok


def is_totally_unimodular(m: ExactMatrix) -> TUVerdict:
    """Exhaustive check that every square submatrix has determinant in {-1, 0, 1}.

    Submatrices are enumerated by increasing size and the first violation is
    returned. Exponential; meant for matrices with at most a dozen columns.
    """
    if m.field != "Q":
        raise DomainError("total unimodularity is tested over Q")
    for i, r in enumerate(m.rows):
        for j, x in enumerate(r):
            if x not in (-1, 0, 1):
                return TUVerdict(False, (i,), (m.labels[j],), x)
    grid = m.integer_rows()
    for k in range(2, min(m.nrows, m.ncols) + 1):
        for rs in itertools.combinations(range(m.nrows), k):
            sub_rows = [grid[i] for i in rs]
            for cs in itertools.combinations(range(m.ncols), k):
                d = bareiss_det([[row[j] for j in cs] for row in sub_rows])
                if d not in (-1, 0, 1):
                    return TUVerdict(False, rs, tuple(m.labels[j] for j in cs), Fraction(d))
    return TUVerdict(True)


def cast_to_field(m: ExactMatrix, p: int) -> ExactMatrix:
    """Reduce a {-1, 0, 1} matrix over Q modulo p (p in {2, 3})."""
    field = {2: "GF2", 3: "GF3"}.get(p)
    if field is None:
        raise DomainError(f"unsupported prime {p}; expected 2 or 3")
    if m.field != "Q":
        raise DomainError("cast_to_field expects a matrix over Q")
    for r in m.rows:
        for x in r:
            if x not in (-1, 0, 1):
                raise DomainError(f"entry {x} outside {{-1, 0, 1}}")
    return ExactMatrix(tuple(tuple(Mod(int(x), p) for x in r) for r in m.rows), m.labels, field)


def parse_matrix(text: str, field: str = "Q") -> ExactMatrix:
    """Parse the plain-text matrix literal: a label header, then one row per line.

    Entries are integers or n/d rationals; blank lines and '#' comments are skipped.
    """
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line))
    if not lines:
        raise SchemaError("empty matrix literal")
    labels = lines[0][1].split()
    rows = []
    for lineno, line in lines[1:]:
        tokens = line.split()
        if len(tokens) != len(labels):
            raise SchemaError(f"line {lineno}: {len(tokens)} entries for {len(labels)} labels")
        try:
            rows.append([Fraction(t) for t in tokens])
        except ValueError as exc:
            raise SchemaError(f"line {lineno}: {exc}") from None
    return ExactMatrix.from_rows(rows, labels, field)


def format_matrix(m: ExactMatrix) -> str:
    cells = [list(m.labels)] + [[str(x) for x in r] for r in m.rows]
    widths = [max(len(c[j]) for c in cells) for j in range(m.ncols)]
    return "\n".join(" ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells)
