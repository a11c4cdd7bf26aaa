"""Feynman graphs as represented matroids.

Exact linear algebra over Q, GF(2) and GF(3); circuits, bases, duality and
minors of represented matroids; the first and second Symanzik polynomials;
tensor reduction of dot-product numerators by matroid coextension; and
integrand emission in momentum and parametric form.
"""

from .errors import (
    ConsistencyError, DimensionError, DomainError, ElementLookupError, FeynmatError,
    IntegrityError, SchemaError, StateError,
)
from .fixtures import load_fixture, load_matrix
from .graph import FeynGraph, cycle_matroid, incidence_matrix, route_momenta
from .integrand import momentum_space, parametric
from .linalg import ExactMatrix, det, is_totally_unimodular, parse_matrix, rank, rref
from .matroid import (
    RepresentedMatroid, bases, bases_with_weights, circuits_of, contract, delete, dual,
    is_1pi, is_regular_by_binary_test, standardize, validate_circuits,
)
from .poly import Poly, parse_poly
from .reduce import DotPair, coextend_pair, normalize_to_IC, reduce_graph, scalarize
from .symanzik import (
    phi_2forest_oracle, phi_block_det, phi_second, psi_base_expansion, psi_block_det,
    psi_circuit_gram,
)

__version__ = "0.1.0"

__all__ = [
    "ConsistencyError", "DimensionError", "DomainError", "ElementLookupError", "FeynmatError",
    "IntegrityError", "SchemaError", "StateError",
    "load_fixture", "load_matrix",
    "FeynGraph", "cycle_matroid", "incidence_matrix", "route_momenta",
    "momentum_space", "parametric",
    "ExactMatrix", "det", "is_totally_unimodular", "parse_matrix", "rank", "rref",
    "RepresentedMatroid", "bases", "bases_with_weights", "circuits_of", "contract", "delete",
    "dual", "is_1pi", "is_regular_by_binary_test", "standardize", "validate_circuits",
    "Poly", "parse_poly",
    "DotPair", "coextend_pair", "normalize_to_IC", "reduce_graph", "scalarize",
    "phi_2forest_oracle", "phi_block_det", "phi_second", "psi_base_expansion", "psi_block_det",
    "psi_circuit_gram",
]
