"""Trade the numerator k_a1 . k_a5 of the three-loop example for shifted propagator powers."""

from feynmat import load_fixture, reduce_graph, scalarize
from feynmat.integrand import from_scalar_term, to_text

g = load_fixture("big_example")
rf = reduce_graph(g, ["a1:a5=a11"], include_legs=True)
for x in rf.new_elements:
    print(f"new element {x.label}: k = {x.momentum}  (alpha={x.alpha}, beta={x.beta})")
print(rf.matrix)

terms = scalarize(g, ["a1:a5=a11"], include_legs=True)
for t in terms:
    print(f"{str(t.coefficient):>5}  shifts {t.shifts}")

ms, par = from_scalar_term(terms[0])
print(to_text(ms, par))
