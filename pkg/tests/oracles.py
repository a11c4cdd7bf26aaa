"""Independent brute-force oracles and random instance generators for the tests."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from feynmat.graph import FeynGraph
from feynmat.linalg import ExactMatrix


def cofactor_det(rows):
    """Laplace expansion along the first row."""
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        if rows[0][j] == 0:
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        total += (-1) ** j * rows[0][j] * cofactor_det(minor)
    return total


def rank_by_elimination(rows, p=None):
    """Plain Gaussian elimination rank, over Q or GF(p)."""
    a = [[Fraction(x) if p is None else int(x) % p for x in r] for r in rows]
    rk = 0
    ncols = len(a[0]) if a else 0
    for c in range(ncols):
        piv = next((i for i in range(rk, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[rk], a[piv] = a[piv], a[rk]
        for i in range(len(a)):
            if i != rk and a[i][c] != 0:
                if p is None:
                    f = a[i][c] / a[rk][c]
                    a[i] = [x - f * y for x, y in zip(a[i], a[rk])]
                else:
                    f = a[i][c] * pow(a[rk][c], p - 2, p)
                    a[i] = [(x - f * y) % p for x, y in zip(a[i], a[rk])]
        rk += 1
    return rk


def _cols(m: ExactMatrix, subset):
    idx = [m.labels.index(x) for x in subset]
    return [[r[j] for j in idx] for r in m.rows]


def independent(m: ExactMatrix, subset, p=None) -> bool:
    if not subset:
        return True
    return rank_by_elimination(_cols(m, subset), p) == len(subset)


def brute_circuits(m: ExactMatrix, p=None) -> set[frozenset]:
    """Minimal dependent column sets by subset enumeration."""
    out = set()
    labels = list(m.labels)
    for k in range(1, len(labels) + 1):
        for sub in itertools.combinations(labels, k):
            if any(c <= set(sub) for c in out):
                continue
            if not independent(m, sub, p):
                out.add(frozenset(sub))
    return out


def brute_bases(m: ExactMatrix, p=None) -> set[frozenset]:
    r = rank_by_elimination([list(x) for x in m.rows], p) if m.rows else 0
    return {frozenset(s) for s in itertools.combinations(m.labels, r) if independent(m, s, p)}


def brute_base_weights(m: ExactMatrix) -> dict[frozenset, Fraction]:
    """det(A_B)^2 for every r-subset with nonzero determinant (A must have full row rank)."""
    r = m.nrows
    out = {}
    for s in itertools.combinations(m.labels, r):
        d = cofactor_det([[Fraction(x) for x in row] for row in _cols(m, s)])
        if d:
            out[frozenset(s)] = d * d
    return out


def minimal_sets(sets) -> set[frozenset]:
    sets = {frozenset(s) for s in sets if s}
    return {s for s in sets if not any(t < s for t in sets)}


def random_connected_graph(rng: random.Random, max_edges: int = 8, max_vertices: int = 5,
                           legs: int | None = None, masses: bool = False) -> FeynGraph:
    """Random spanning tree plus extra (possibly parallel) edges, random orientations."""
    nv = rng.randint(2, max_vertices)
    nv = min(nv, max_edges + 1)
    verts = [f"v{i + 1}" for i in range(nv)]
    pairs = []
    for i in range(1, nv):
        pairs.append((verts[rng.randrange(i)], verts[i]))
    extra = rng.randint(0, max_edges - len(pairs))
    for _ in range(extra):
        a, b = rng.sample(verts, 2)
        pairs.append((a, b))
    rng.shuffle(pairs)
    edges = []
    for k, (a, b) in enumerate(pairs):
        if rng.random() < 0.5:
            a, b = b, a
        mass = f"m{k + 1}" if masses and rng.random() < 0.5 else None
        edges.append((f"e{k + 1}", a, b, mass))
    nlegs = rng.choice([0, 2, 3, 4]) if legs is None else legs
    ext = [(f"x{i + 1}", rng.choice(verts), f"q{i + 1}") for i in range(nlegs)]
    return FeynGraph.build(verts, edges, ext)


def random_pairs(rng: random.Random, g: FeynGraph, max_pairs: int = 3):
    ids = list(g.edge_ids)
    out = []
    for _ in range(rng.randint(0, max_pairs)):
        if len(ids) < 2:
            break
        out.append(tuple(rng.sample(ids, 2)))
    return out
