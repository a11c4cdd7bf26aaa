"""First and second Symanzik polynomials of represented matroids.

Psi is computed three ways (block determinant, base expansion, Gram
determinant of a circuit basis) so that each method can be checked against
the others. Edge variables are named after the column labels.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError, StateError
from .graph import FeynGraph, cycle_matroid, extended_incidence, two_forests
from .linalg import ExactMatrix, bareiss_det, det, rank, rref
from .matroid import RepresentedMatroid, bases_with_weights, standardize
from .poly import Poly

# Global sign relating z_i z_j coefficients to dot products s_ij. Calibrated
# once on the Dunce's cap and frozen; the 2-forest oracle guards it.
PHI_SIGN = 1


def _poly_det(grid: Sequence[Sequence[Poly]]) -> Poly:
    value = bareiss_det(grid, complete_pivoting=True, cost=len)
    return value if isinstance(value, Poly) else Poly.const(value)


def _matrix_of(m) -> ExactMatrix:
    if isinstance(m, FeynGraph):
        return cycle_matroid(m).matrix
    if isinstance(m, RepresentedMatroid):
        return m.matrix
    if isinstance(m, ExactMatrix):
        return m
    raise TypeError(f"expected a matroid, matrix or graph, got {type(m).__name__}")


def _require_rational(matrix: ExactMatrix):
    if matrix.field != "Q":
        raise DomainError("Symanzik polynomials are defined for representations over Q")


def edge_product(labels: Iterable[str]) -> Poly:
    return Poly.monomial(list(labels))


def psi_block_det(m) -> Poly:
    """det [[diag(a), A^T], [-A, 0]] for a full-row-rank A."""
    a = _matrix_of(m)
    _require_rational(a)
    r, n = a.nrows, a.ncols
    if rank(a) != r:
        raise StateError(f"matrix of rank {rank(a)} has {r} rows; drop dependent rows first")
    zero = Poly()
    size = n + r
    grid = [[zero] * size for _ in range(size)]
    for j, lab in enumerate(a.labels):
        grid[j][j] = Poly.var(lab)
    for i in range(r):
        for j in range(n):
            x = a.rows[i][j]
            if x:
                grid[j][n + i] = Poly.const(x)
                grid[n + i][j] = Poly.const(-x)
    return _poly_det(grid)


def psi_base_expansion(m) -> Poly:
    """Sum over bases B of det(A_B)^2 times the product of a_e outside B."""
    a = _matrix_of(m)
    _require_rational(a)
    matroid = m if isinstance(m, RepresentedMatroid) else RepresentedMatroid.from_matrix(a)
    ground = matroid.ground
    out = Poly()
    for wb in bases_with_weights(matroid):
        out = out + edge_product(e for e in ground if e not in wb.base) * wb.weight
    return out


def fundamental_null_basis(m) -> list[dict[str, Fraction]]:
    """Cycle-space basis from the standardization: one vector per non-base element."""
    matroid = m if isinstance(m, RepresentedMatroid) else RepresentedMatroid.from_matrix(_matrix_of(m))
    std = standardize(matroid).matrix
    r = std.nrows
    basis = []
    for f in range(r, std.ncols):
        vec = {std.labels[f]: Fraction(1)}
        for i in range(r):
            x = std.rows[i][f]
            if x:
                vec[std.labels[i]] = -Fraction(x)
        basis.append(vec)
    return basis


def psi_circuit_gram(m) -> Poly:
    """det(N^T diag(a) N) for the fundamental circuit basis N.

    The Gram determinant of that basis is Psi of the standardized matrix; the
    factor det(A_B0)^2 of the starting base rescales it to the input matrix.
    """
    a = _matrix_of(m)
    _require_rational(a)
    matroid = m if isinstance(m, RepresentedMatroid) else RepresentedMatroid.from_matrix(a)
    _, pivots = rref(matroid.matrix)
    scale = det(matroid.matrix.select(list(pivots))) ** 2
    basis = fundamental_null_basis(matroid)
    if not basis:
        return Poly.const(scale)
    gram = []
    for u in basis:
        row = []
        for v in basis:
            entry = Poly()
            for e, x in u.items():
                y = v.get(e)
                if y:
                    entry = entry + Poly.var(e) * (x * y)
            row.append(entry)
        gram.append(row)
    return _poly_det(gram) * scale


def gram_matrix(m) -> list[list[Poly]]:
    """The Gram matrix whose determinant `psi_circuit_gram` returns (unscaled)."""
    basis = fundamental_null_basis(m)
    return [[sum((Poly.var(e) * (x * v.get(e, 0)) for e, x in u.items()), Poly())
             for v in basis] for u in basis]


def dual_transform(p: Poly, variables: Sequence[str]) -> Poly:
    """(prod a_e) * p(1/a) for a polynomial of degree at most one in each variable."""
    vs = list(variables)
    out = {}
    for mono, c in p.terms.items():
        powers = dict(mono)
        if any(powers.get(v, 0) > 1 for v in vs):
            raise DomainError("dual_transform needs a multilinear polynomial")
        new = {v: 1 - powers.get(v, 0) for v in vs}
        new.update({v: e for v, e in powers.items() if v not in vs})
        out.update(Poly.monomial(new, c).terms)
    return Poly(out)


@dataclass(frozen=True)
class DotTable:
    """Names for the dot products q_i . q_j of the external momenta."""

    symbols: tuple[str, ...]

    @classmethod
    def for_graph(cls, g: FeynGraph) -> "DotTable":
        return cls(tuple(leg.symbol for leg in g.externals))

    def name(self, i: int, j: int) -> str:
        """Symbol for legs i, j (0-based, either order)."""
        i, j = sorted((i, j))
        if len(self.symbols) <= 9:
            return f"s{i + 1}{j + 1}"
        return f"s{i + 1}_{j + 1}"

    def of(self, qa: str, qb: str) -> str:
        return self.name(self.symbols.index(qa), self.symbols.index(qb))

    def names(self) -> list[str]:
        k = len(self.symbols)
        return [self.name(i, j) for i in range(k) for j in range(i, k)]

    def meaning(self) -> dict[str, str]:
        k = len(self.symbols)
        return {self.name(i, j): f"{self.symbols[i]}.{self.symbols[j]}"
                for i in range(k) for j in range(i, k)}


def _zvar(i: int) -> str:
    return f"z{i + 1}"


def _z_to_s(zpoly: Poly, k: int, dots: DotTable) -> Poly:
    """Map z_i z_j -> sign * s_ij on the part of degree two in z."""
    zs = [_zvar(i) for i in range(k)]
    out = Poly()
    for mono, c in zpoly.part(zs, 2).terms.items():
        powers = dict(mono)
        idx = [i for i in range(k) for _ in range(powers.pop(_zvar(i), 0))]
        s = dots.name(idx[0], idx[1])
        out = out + Poly.monomial({**powers, s: 1}, c * PHI_SIGN)
    return out


@dataclass(frozen=True)
class _ExtendedData:
    internal: ExactMatrix        # rows without the dropped one
    legs: ExactMatrix
    kappa: tuple[Fraction, ...]  # conservation: sum kappa_i q_i = 0


def _extended(source, legs: Sequence[str] | None) -> tuple[_ExtendedData, DotTable]:
    if isinstance(source, FeynGraph):
        if len(source.externals) < 2:
            raise DomainError(f"second Symanzik polynomial needs at least 2 external legs, "
                              f"got {len(source.externals)}")
        full = extended_incidence(source)
        leg_ids = [leg.id for leg in source.externals]
        dots = DotTable.for_graph(source)
    else:
        full = _matrix_of(source)
        if legs is None:
            raise DomainError("name the external columns of the extended matrix (legs=...)")
        leg_ids = list(legs)
        if len(leg_ids) < 2:
            raise DomainError(f"second Symanzik polynomial needs at least 2 external legs, "
                              f"got {len(leg_ids)}")
        dots = DotTable(tuple(leg_ids))
    _require_rational(full)
    internal_ids = [x for x in full.labels if x not in leg_ids]
    a, x = full.select(internal_ids), full.select(leg_ids)
    rows = full.nrows
    if rank(full) != rows:
        raise StateError("extended matrix is not of full row rank")
    if rank(a) != rows - 1:
        raise StateError(f"internal block must have rank {rows - 1} (one conservation law); "
                         f"it has rank {rank(a)}")
    # left null vector u of A: u^T A = 0
    transpose = ExactMatrix.from_rows([list(col) for col in zip(*a.rows)] or [[0] * rows],
                                      [f"r{i}" for i in range(rows)])
    red, pivots = rref(transpose)
    free = [j for j in range(rows) if j not in pivots]
    u = [Fraction(0)] * rows
    u[free[0]] = Fraction(1)
    for i, p in enumerate(pivots):
        u[p] = -Fraction(red.rows[i][free[0]])
    p = max(i for i in range(rows) if u[i])
    kappa = tuple(sum(u[i] * Fraction(x.rows[i][j]) for i in range(rows)) for j in range(x.ncols))
    keep = [i for i in range(rows) if i != p]
    data = _ExtendedData(a.with_rows(a.rows[i] for i in keep), x.with_rows(x.rows[i] for i in keep),
                         kappa)
    return data, dots


def _canonical(ell: list[Fraction], kappa: Sequence[Fraction]) -> list[Fraction]:
    """Sparsest representative of ell modulo multiples of kappa."""
    options = [Fraction(0)] + [-ell[i] / kappa[i] for i in range(len(ell)) if kappa[i]]
    best = None
    for t in options:
        cand = [e + t * k for e, k in zip(ell, kappa)]
        support = tuple(i for i, c in enumerate(cand) if c)
        key = (len(support), support)
        if best is None or key < best[0]:
            best = (key, cand)
    return best[1]


def _phi_z(data: _ExtendedData, canonical: bool = True) -> Poly:
    a, x = data.internal, data.legs
    r = a.nrows
    k = x.ncols
    labels = a.labels
    out = Poly()
    for forest in itertools.combinations(range(a.ncols), r - 1):
        cols = [[row[j] for j in forest] for row in a.rows]
        ell = []
        for i in range(k):
            grid = [c + [x.rows[t][i]] for t, c in enumerate(cols)]
            ell.append(Fraction(bareiss_det(grid)))
        if not any(ell):
            continue
        if canonical:
            ell = _canonical(ell, data.kappa)
        lin = sum((Poly.var(_zvar(i)) * c for i, c in enumerate(ell) if c), Poly())
        out = out + lin * lin * edge_product(labels[j] for j in range(a.ncols) if j not in forest)
    return out


def _conserve_z(zpoly: Poly, kappa: Sequence[Fraction]) -> Poly:
    """Eliminate the last leg with a nonzero conservation coefficient."""
    p = max(i for i, c in enumerate(kappa) if c)
    repl = sum((Poly.var(_zvar(i)) * (-kappa[i] / kappa[p])
                for i in range(len(kappa)) if i != p and kappa[i]), Poly())
    return zpoly.subs({_zvar(p): repl})


def phi_second(source, dots: DotTable | None = None, *, legs: Sequence[str] | None = None,
               conserve: bool = False) -> Poly:
    """Second Symanzik polynomial as a polynomial in edge variables and s_ij.

    `source` is a graph with external legs, or an extended matrix (A | X)
    whose columns named in `legs` carry the external momenta. Each term is
    the square of the momentum flowing across a spanning forest of the
    extended object, reduced to its sparsest form using momentum
    conservation; with `conserve=True` the last leg is eliminated instead.
    """
    data, default_dots = _extended(source, legs)
    dots = dots or default_dots
    z = _phi_z(data)
    if conserve:
        z = _conserve_z(z, data.kappa)
    return _z_to_s(z, data.legs.ncols, dots)


def phi_block_det(source, dots: DotTable | None = None, *,
                  legs: Sequence[str] | None = None) -> Poly:
    """Phi from one determinant, [[diag(a), A^T], [-A, 0]] with A = (A_top | X z).

    The external column gets weight zero, so only bases through it survive.
    The result has the last leg eliminated by momentum conservation.
    """
    data, default_dots = _extended(source, legs)
    dots = dots or default_dots
    a, x = data.internal, data.legs
    r, n, k = a.nrows, a.ncols, x.ncols
    w = [sum((Poly.var(_zvar(i)) * x.rows[t][i] for i in range(k) if x.rows[t][i]), Poly())
         for t in range(r)]
    size = n + 1 + r
    zero = Poly()
    grid = [[zero] * size for _ in range(size)]
    for j, lab in enumerate(a.labels):
        grid[j][j] = Poly.var(lab)
    for t in range(r):
        for j in range(n):
            v = a.rows[t][j]
            if v:
                grid[j][n + 1 + t] = Poly.const(v)
                grid[n + 1 + t][j] = Poly.const(-v)
        grid[n][n + 1 + t] = w[t]
        grid[n + 1 + t][n] = -w[t]
    z = _conserve_z(_poly_det(grid), data.kappa)
    return _z_to_s(z, k, dots)


def phi_2forest_oracle(g: FeynGraph, dots: DotTable | None = None) -> Poly:
    """Sum over spanning 2-forests of (momentum entering one side)^2 times a_e off the forest.

    The side with fewer legs is used (ties: smaller leg positions), which is
    the same convention `phi_second` reaches through momentum conservation.
    """
    if len(g.externals) < 2:
        raise DomainError("second Symanzik polynomial needs at least 2 external legs")
    dots = dots or DotTable.for_graph(g)
    out = Poly()
    for tf in two_forests(g):
        sides = []
        for part in tf.parts:
            idx = tuple(i for i, leg in enumerate(g.externals) if leg.vertex in part)
            sides.append((len(idx), idx))
        _, idx = min(sides)
        if not idx:
            continue
        square = Poly()
        for i in idx:
            for j in idx:
                square = square + Poly.var(dots.name(i, j))
        complement = edge_product(e for e in g.edge_ids if e not in tf.edges)
        out = out + square * complement * PHI_SIGN
    return out


def spanning_tree_oracle(g: FeynGraph) -> Poly:
    """Kirchhoff polynomial from brute-force spanning trees."""
    from .graph import spanning_trees

    out = Poly()
    for tree in spanning_trees(g):
        out = out + edge_product(e for e in g.edge_ids if e not in tree)
    return out
