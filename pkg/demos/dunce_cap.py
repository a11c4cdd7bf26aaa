"""Symanzik polynomials of the dunce's cap computed three ways."""

from feynmat import (circuits_of, cycle_matroid, load_fixture, phi_2forest_oracle, phi_second,
                     psi_base_expansion, psi_block_det, psi_circuit_gram)

g = load_fixture("dunce_cap")
m = cycle_matroid(g)

print("circuits:", circuits_of(m).ordered())
for name, f in (("block determinant", psi_block_det), ("base expansion", psi_base_expansion),
                ("Gram determinant", psi_circuit_gram)):
    print(f"Psi ({name}): {f(m)}")
print("Phi:", phi_second(g))
print("Phi (2-forests):", phi_2forest_oracle(g))
