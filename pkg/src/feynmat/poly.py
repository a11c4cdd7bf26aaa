"""Sparse multivariate polynomials with exact rational coefficients.

A monomial is a tuple of (variable, exponent) pairs sorted by `var_key`, so
polynomials over different variable sets combine without bookkeeping.
Output is ordered graded-lexicographically, which keeps printed results
byte-for-byte reproducible.
"""

from __future__ import annotations

import functools
import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DomainError

Monomial = tuple  # tuple[tuple[str, int], ...]

_DIGITS = re.compile(r"(\d+)")


def var_key(name: str):
    """Natural sort key: 'a2' < 'a10'."""
    return tuple(int(p) if i % 2 else p for i, p in enumerate(_DIGITS.split(name)))


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items(), key=lambda t: var_key(t[0])))


def _mono_div(m1: Monomial, m2: Monomial) -> Monomial | None:
    d = dict(m1)
    for v, e in m2:
        left = d.get(v, 0) - e
        if left < 0:
            return None
        if left:
            d[v] = left
        else:
            del d[v]
    return tuple(sorted(d.items(), key=lambda t: var_key(t[0])))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _lex_cmp(m1: Monomial, m2: Monomial) -> int:
    i = j = 0
    while i < len(m1) and j < len(m2):
        (v1, e1), (v2, e2) = m1[i], m2[j]
        if v1 == v2:
            if e1 != e2:
                return 1 if e1 > e2 else -1
            i += 1
            j += 1
        elif var_key(v1) < var_key(v2):
            return 1
        else:
            return -1
    if i < len(m1):
        return 1
    if j < len(m2):
        return -1
    return 0


def _grlex_cmp(m1: Monomial, m2: Monomial) -> int:
    d1, d2 = _mono_degree(m1), _mono_degree(m2)
    if d1 != d2:
        return 1 if d1 > d2 else -1
    return _lex_cmp(m1, m2)


_GRLEX = functools.cmp_to_key(_grlex_cmp)


def _ordered_grlex_key(order: Sequence[str]):
    rank = {v: i for i, v in enumerate(order)}

    def key(m: Monomial):
        dense = [0] * len(order)
        extra = []
        for v, e in m:
            if v in rank:
                dense[rank[v]] = e
            else:
                extra.append((var_key(v), e))
        return (-_mono_degree(m), [-x for x in dense], sorted(extra))

    return key


def _scalar(x) -> Fraction | None:
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return None


class Poly:
    """Immutable sparse polynomial; zero coefficients are never stored."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        clean = {}
        for m, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[m] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def var(cls, name: str) -> "Poly":
        return cls({((name, 1),): 1})

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(): c})

    @classmethod
    def monomial(cls, powers: Mapping[str, int] | Iterable[str], coeff=1) -> "Poly":
        if not isinstance(powers, Mapping):
            counts: dict[str, int] = {}
            for v in powers:
                counts[v] = counts.get(v, 0) + 1
            powers = counts
        mono = tuple(sorted(((v, e) for v, e in powers.items() if e), key=lambda t: var_key(t[0])))
        return cls({mono: coeff})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __iter__(self):
        return iter(sorted(self._terms.items(), key=lambda t: _GRLEX(t[0]), reverse=True))

    # arithmetic

    def _coerce(self, other) -> "Poly | None":
        if isinstance(other, Poly):
            return other
        s = _scalar(other)
        return Poly.const(s) if s is not None else None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        s = _scalar(other)
        if s is not None:
            return Poly({m: c * s for m, c in self._terms.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise DomainError("negative power of a polynomial")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def leading(self) -> tuple[Monomial, Fraction]:
        if not self._terms:
            raise DomainError("zero polynomial has no leading term")
        m = max(self._terms, key=_GRLEX)
        return m, self._terms[m]

    def __truediv__(self, other):
        """Exact division; raises ArithmeticError if `other` does not divide self."""
        s = _scalar(other)
        if s is not None:
            if not s:
                raise ZeroDivisionError("polynomial division by zero")
            return Poly({m: c / s for m, c in self._terms.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        if len(other) == 1:
            (dm, dc), = other._terms.items()
            out = {}
            for m, c in self._terms.items():
                q = _mono_div(m, dm)
                if q is None:
                    raise ArithmeticError("inexact polynomial division")
                out[q] = c / dc
            return Poly(out)
        lm, lc = other.leading()
        rem = dict(self._terms)
        quot: dict = {}
        while rem:
            m = max(rem, key=_GRLEX)
            q = _mono_div(m, lm)
            if q is None:
                raise ArithmeticError("inexact polynomial division")
            c = rem[m] / lc
            quot[q] = quot.get(q, 0) + c
            for om, oc in other._terms.items():
                t = _mono_mul(q, om)
                v = rem.get(t, 0) - c * oc
                if v:
                    rem[t] = v
                else:
                    rem.pop(t, None)
        return Poly(quot)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # inspection

    def variables(self) -> set[str]:
        return {v for m in self._terms for v, _ in m}

    def coefficient(self, powers: Mapping[str, int] | Iterable[str]) -> Fraction:
        mono = next(iter(Poly.monomial(powers)._terms))
        return self._terms.get(mono, Fraction(0))

    def degree(self, variables: Iterable[str] | None = None) -> int:
        if not self._terms:
            return -1
        if variables is None:
            return max(_mono_degree(m) for m in self._terms)
        vs = set(variables)
        return max(sum(e for v, e in m if v in vs) for m in self._terms)

    def homogeneous_degree(self, variables: Iterable[str] | None = None) -> int | None:
        """Common degree of all terms in `variables` (all variables if None), else None."""
        vs = None if variables is None else set(variables)
        degs = {sum(e for v, e in m if vs is None or v in vs) for m in self._terms}
        return degs.pop() if len(degs) == 1 else None

    def part(self, variables: Iterable[str], degree: int) -> "Poly":
        """Terms whose degree in `variables` equals `degree`."""
        vs = set(variables)
        return Poly({m: c for m, c in self._terms.items()
                     if sum(e for v, e in m if v in vs) == degree})

    def subs(self, values: Mapping[str, object]) -> "Poly":
        """Substitute polynomials or scalars for variables."""
        out = Poly()
        for m, c in self._terms.items():
            term = Poly.const(c)
            rest = {}
            for v, e in m:
                if v in values:
                    term = term * (Poly._lift(values[v]) ** e)
                else:
                    rest[v] = e
            out = out + term * Poly.monomial(rest)
        return out

    @staticmethod
    def _lift(x) -> "Poly":
        return x if isinstance(x, Poly) else Poly.const(x)

    def constant(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    # output

    def ordered_terms(self, order: Sequence[str] | None = None) -> list[tuple[Monomial, Fraction]]:
        if order is None:
            return list(self)
        key = _ordered_grlex_key(order)
        return sorted(self._terms.items(), key=lambda t: key(t[0]))

    def to_str(self, order: Sequence[str] | None = None) -> str:
        if not self._terms:
            return "0"
        parts = []
        for m, c in self.ordered_terms(order):
            body = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
            if not body:
                text = str(abs(c))
            elif abs(c) == 1:
                text = body
            else:
                text = f"{abs(c)}*{body}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, text))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, text in parts[1:]:
            out += f" {sign} {text}"
        return out

    def to_lines(self, order: Sequence[str] | None = None) -> list[str]:
        """One 'coefficient * v^e ...' line per term."""
        lines = []
        for m, c in self.ordered_terms(order):
            body = " ".join(v if e == 1 else f"{v}^{e}" for v, e in m) or "1"
            lines.append(f"{c} * {body}")
        return lines

    def to_json(self, order: Sequence[str] | None = None) -> list[dict]:
        return [{"coefficient": str(c), "monomial": {v: e for v, e in m}}
                for m, c in self.ordered_terms(order)]

    @classmethod
    def from_json(cls, terms: Iterable[Mapping]) -> "Poly":
        out = cls()
        for t in terms:
            out = out + cls.monomial(dict(t["monomial"]), Fraction(t["coefficient"]))
        return out

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"Poly({self.to_str()!r})"


def parse_poly(text: str) -> Poly:
    """Parse a small polynomial expression such as '(a+b)*(c+d) + c*d' (tests, CLI)."""
    import ast

    tree = ast.parse(text, mode="eval")

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.BinOp):
            left, right = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Pow):
                return left ** int(right.constant())
            if isinstance(node.op, ast.Div):
                return left / right
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -walk(node.operand)
        if isinstance(node, ast.Name):
            return Poly.var(node.id)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return Poly.const(node.value)
        raise DomainError(f"unsupported syntax in polynomial {text!r}")

    return walk(tree)
