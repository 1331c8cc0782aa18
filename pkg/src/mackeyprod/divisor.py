"""Closed points and effective divisors on P^1 over a finite field.

A closed point is either a monic irreducible polynomial in the affine
parameter t, or the point at infinity, where the local parameter is s = 1/t.
Local computations at infinity are done in F[s] directly, so no coordinate
change is needed anywhere.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from . import poly as P
from .ffield import FieldDesc, FieldElem, FieldError

INF = "inf"


@dataclass(frozen=True)
class ClosedPoint:
    field: FieldDesc
    poly: tuple | None  # None for the point at infinity

    @property
    def is_infinity(self) -> bool:
        return self.poly is None

    @property
    def degree(self) -> int:
        return 1 if self.poly is None else P.degree(self.poly)

    def sort_key(self):
        if self.poly is None:
            return (1, 0, ())
        return (0, self.degree, tuple(c.coeffs for c in self.poly))

    def __str__(self) -> str:
        if self.poly is None:
            return "inf"
        if self.degree == 1:
            root = -self.poly[0]
            if self.field.d == 1:
                return str(root.coeffs[0])
        return P.format_poly(self.poly)

    def local_parameter(self) -> tuple:
        """Uniformizer: the polynomial itself, or s at infinity."""
        return self.poly if self.poly is not None else P.monomial(self.field, 1)

    def local_modulus(self, mult: int, over: FieldDesc | None = None) -> tuple:
        m = P.power(self.local_parameter(), mult, self.field)
        return P.change_field(m, over) if over is not None else m


def point(field: FieldDesc, spec) -> ClosedPoint:
    """ClosedPoint from 'inf', an integer c (the point t = c), or a polynomial."""
    if isinstance(spec, ClosedPoint):
        return spec
    if spec == INF or spec is None:
        return ClosedPoint(field, None)
    if isinstance(spec, int):
        return ClosedPoint(field, (field.scalar(-spec), field.one()))
    if isinstance(spec, FieldElem):
        return ClosedPoint(field, (-spec, field.one()))
    f = P.monic(tuple(spec))
    if P.degree(f) < 1 or not P.is_irreducible(f):
        raise FieldError(f"{P.format_poly(f)} is not irreducible of positive degree")
    return ClosedPoint(field, f)


@dataclass(frozen=True)
class Divisor:
    """Divisor as sorted (point, multiplicity) pairs; effective unless built with signed=True."""

    field: FieldDesc
    terms: tuple[tuple[ClosedPoint, int], ...]

    @classmethod
    def from_terms(cls, field: FieldDesc, terms: Iterable[tuple[object, int]],
                   signed: bool = False) -> "Divisor":
        acc: dict[ClosedPoint, int] = {}
        for pt, m in terms:
            cp = point(field, pt)
            if m < 0 and not signed:
                raise ValueError("effective divisors only")
            acc[cp] = acc.get(cp, 0) + m
        items = sorted(((p, m) for p, m in acc.items() if m), key=lambda pm: pm[0].sort_key())
        return cls(field, tuple(items))

    @property
    def support(self) -> list[ClosedPoint]:
        return [p for p, _ in self.terms]

    @property
    def degree(self) -> int:
        return sum(p.degree * m for p, m in self.terms)

    def multiplicity(self, pt: ClosedPoint) -> int:
        return dict(self.terms).get(pt, 0)

    def reduced(self) -> "Divisor":
        return Divisor(self.field, tuple((p, 1) for p, _ in self.terms))

    def is_empty(self) -> bool:
        return not self.terms

    @property
    def is_effective(self) -> bool:
        return all(m > 0 for _, m in self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for p, m in self.terms:
            body = f"({p})"
            term = body if m == 1 else f"-{body}" if m == -1 else f"{m}*{body}"
            parts.append(term if not parts or term.startswith("-") else "+" + term)
        return "".join(parts)


@dataclass(frozen=True)
class Modulus:
    """A nonempty divisor D and the open curve X = P^1 minus supp(D)."""

    divisor: Divisor

    def __post_init__(self):
        if self.divisor.is_empty():
            raise ValueError("a modulus needs nonempty support")
        if not self.divisor.is_effective:
            raise ValueError("a modulus must be effective")

    @property
    def field(self) -> FieldDesc:
        return self.divisor.field

    def in_curve(self, pt: ClosedPoint) -> bool:
        return pt not in self.divisor.support

    def __str__(self) -> str:
        return str(self.divisor)


def modulus_from_poly(f: tuple) -> Divisor:
    """Divisor of zeros of a polynomial modulus such as t^2 or t*(t+1)."""
    field = f[0].field
    return Divisor.from_terms(field, [(ClosedPoint(field, g), e) for g, e in P.factor(f)])


_PT = re.compile(r"^(?:(\d+)\*)?\(?([^()]*)\)?$")


def parse_divisor(text: str, field: FieldDesc) -> Divisor:
    """Parse '(0)+(inf)', '2*inf', '2*(0)+(t^2+1)', '3*(1)'.

    A parenthesised integer c denotes the rational point t = c; any other
    parenthesised body is a polynomial in t, which must be irreducible.
    """
    terms = []
    depth, cur = 0, ""
    for ch in text.replace(" ", ""):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "+" and depth == 0:
            terms.append(cur)
            cur = ""
        else:
            cur += ch
    if cur:
        terms.append(cur)
    out = []
    for term in terms:
        m = _PT.match(term)
        if not m:
            raise FieldError(f"cannot parse divisor term {term!r}")
        mult = int(m.group(1) or 1)
        body = m.group(2)
        if body == INF:
            out.append((INF, mult))
        elif re.fullmatch(r"-?\d+", body):
            out.append((int(body), mult))
        else:
            out.append((P.parse_poly(body, field), mult))
    return Divisor.from_terms(field, out)


# --- local expansions ------------------------------------------------------------

def _split_valuation(f: tuple, pi: tuple) -> tuple[int, tuple]:
    v = 0
    while True:
        q, r = P.divmod_(f, pi)
        if r:
            return v, f
        f, v = q, v + 1


def local_data(num: tuple, den: tuple, pt: ClosedPoint, mult: int) -> tuple[int, tuple]:
    """(valuation, unit part mod the local modulus) of num/den at pt.

    The unit part is taken relative to the uniformizer `pt.local_parameter()`.
    """
    field = pt.field
    if not num or not den:
        raise ZeroDivisionError("zero function has no local data")
    if pt.is_infinity:
        v = P.degree(den) - P.degree(num)
        un, ud = P.reverse(num), P.reverse(den)
    else:
        vn, un = _split_valuation(num, pt.poly)
        vd, ud = _split_valuation(den, pt.poly)
        v = vn - vd
    m = pt.local_modulus(mult)
    if mult == 0:
        return v, ()
    unit = P.mod(P.mul(un, P.inverse_mod(ud, m, field)), m)
    return v, unit


def valuation(num: tuple, den: tuple, pt: ClosedPoint) -> int:
    return local_data(num, den, pt, 0)[0]
