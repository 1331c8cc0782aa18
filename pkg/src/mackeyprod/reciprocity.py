"""The reciprocity law for GA and GM sections on open subsets of P^1.

For a section a on an open curve C and a rational function f with f = 1 mod D,

    sum_{x in C} v_x(f) Tr_{x/F}(a(x)) = 0            (GA)
    prod_{x in C} N_{x/F}(a(x))^{v_x(f)} = 1          (GM)

once D is large enough.  The direct sums are checked against independent
boundary computations: the residue theorem for a df/f and Weil reciprocity
for tame symbols, both evaluated only at the removed points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from . import poly as P
from .divisor import INF, ClosedPoint, Divisor, point
from .ffield import FieldDesc, FieldElem, FieldError, embed, extension, norm, trace
from .groups import GA, GM, GroupValue, Kind, ValueFunctor


class ReciprocityError(ValueError):
    pass


@dataclass(frozen=True)
class RationalFunction:
    """num/den with den monic and gcd(num, den) = 1."""

    num: tuple
    den: tuple

    @classmethod
    def make(cls, num: tuple, den: tuple) -> "RationalFunction":
        if not num:
            raise ZeroDivisionError("the zero function")
        if not den:
            raise ZeroDivisionError("zero denominator")
        g = P.gcd(num, den)
        num, den = P.divmod_(num, g)[0], P.divmod_(den, g)[0]
        lc = den[-1].inverse()
        return cls(P.scale(num, lc), P.scale(den, lc))

    @property
    def field(self) -> FieldDesc:
        return self.num[0].field

    def __str__(self) -> str:
        n = P.format_poly(self.num)
        if P.degree(self.den) == 0:
            return n
        return f"({n})/({P.format_poly(self.den)})"


def parse_function(text: str, field: FieldDesc) -> RationalFunction:
    text = text.replace(" ", "")
    if "/" in text:
        a, b = text.split("/", 1)
        return RationalFunction.make(P.parse_poly(a.strip("()"), field), P.parse_poly(b.strip("()"), field))
    return RationalFunction.make(P.parse_poly(text.strip("()"), field), P.const(field, 1))


@dataclass(frozen=True)
class OpenCurve:
    field: FieldDesc
    removed: tuple[ClosedPoint, ...]

    def __post_init__(self):
        if not self.removed:
            raise ReciprocityError("an open curve must remove at least one point")
        if len(set(self.removed)) != len(self.removed):
            raise ReciprocityError("removed points must be distinct")

    def contains(self, pt: ClosedPoint) -> bool:
        return pt not in self.removed

    def __str__(self) -> str:
        return "P1-{" + ",".join(str(p) for p in self.removed) + "}"


def open_curve(field: FieldDesc, removed) -> OpenCurve:
    pts = sorted({point(field, r) for r in removed}, key=lambda p: p.sort_key())
    return OpenCurve(field, tuple(pts))


def parse_curve(text: str, field: FieldDesc) -> OpenCurve:
    """'P1-{0,inf}' or 'P1-{inf}'."""
    text = text.replace(" ", "")
    if not (text.startswith("P1-{") and text.endswith("}")):
        raise ReciprocityError(f"cannot parse curve {text!r}; expected P1-{{...}}")
    items = []
    for tok in text[4:-1].split(","):
        if not tok:
            raise ReciprocityError(f"empty point in curve {text!r}")
        if tok == INF:
            items.append(INF)
        elif tok.lstrip("-").isdigit():
            items.append(int(tok))
        else:
            items.append(P.parse_poly(tok, field))
    try:
        return open_curve(field, items)
    except FieldError as exc:
        raise ReciprocityError(f"curve {text!r}: {exc}") from exc


@dataclass(frozen=True)
class Section:
    functor: ValueFunctor
    function: RationalFunction
    curve: OpenCurve

    def __post_init__(self):
        div = divisor_of(self.function)
        if self.functor.kind is Kind.GM:
            bad = [p for p, _ in div.terms if self.curve.contains(p)]
            if bad:
                raise ReciprocityError(f"GM section is not invertible at {bad[0]}")
        elif self.functor.kind is Kind.GA:
            bad = [p for p, m in div.terms if m < 0 and self.curve.contains(p)]
            if bad:
                raise ReciprocityError(f"GA section has a pole at {bad[0]}")
        else:
            raise ReciprocityError("sections are implemented for GA and GM only")


def parse_section(text: str, curve: OpenCurve) -> Section:
    """'GM:t', 'GA:t', 'GM:(t+1)/t'."""
    kind, _, body = text.partition(":")
    F = curve.field
    fn = {"GA": GA, "GM": GM}.get(kind.strip().upper())
    if fn is None or not body:
        raise ReciprocityError(f"cannot parse section {text!r}")
    return Section(fn(F), parse_function(body, F), curve)


# --- divisors and congruences ---------------------------------------------------------

def divisor_of(f: RationalFunction) -> Divisor:
    F = f.field
    terms = []
    for g, e in P.factor(f.num) if P.degree(f.num) > 0 else []:
        terms.append((ClosedPoint(F, g), e))
    for g, e in P.factor(f.den) if P.degree(f.den) > 0 else []:
        terms.append((ClosedPoint(F, g), -e))
    v_inf = P.degree(f.den) - P.degree(f.num)
    if v_inf:
        terms.append((INF, v_inf))
    return Divisor.from_terms(F, terms, signed=True)


def _valuation(f: RationalFunction, pt: ClosedPoint) -> int:
    if pt.is_infinity:
        return P.degree(f.den) - P.degree(f.num)
    v = 0
    for poly, sign in ((f.num, 1), (f.den, -1)):
        while poly:
            q, r = P.divmod_(poly, pt.poly)
            if r:
                break
            poly, v = q, v + sign
    return v


def check_congruence(f: RationalFunction, D: Divisor) -> bool:
    """div(f - 1) >= D on supp(D)."""
    g = P.sub(f.num, f.den)
    if not g:
        return True
    h = RationalFunction.make(g, f.den)
    return all(_valuation(h, p) >= m for p, m in D.terms)


# --- evaluation at closed points ---------------------------------------------------

@lru_cache(maxsize=None)
def _root(pt: ClosedPoint) -> FieldElem:
    """Least root of pt.poly in the residue field F_{q^deg}."""
    E = extension(pt.field, pt.degree)
    for z in E.elements():
        if P.evaluate(pt.poly, z).is_zero():
            return z
    raise FieldError(f"{pt} has no root in {E!r}")


def residue_value(f: RationalFunction, pt: ClosedPoint) -> FieldElem | None:
    """f(x) in the residue field of x, or None if f has a pole there."""
    if pt.is_infinity:
        dn, dd = P.degree(f.num), P.degree(f.den)
        if dn > dd:
            return None
        F = f.field
        return f.num[-1] / f.den[-1] if dn == dd else F.zero()
    z = _root(pt)
    d = P.evaluate(f.den, z)
    if d.is_zero():
        return None
    return P.evaluate(f.num, z) / d


def _unit_value(f: RationalFunction, pt: ClosedPoint) -> tuple[int, FieldElem]:
    """(v_x(f), value of f / pi^v at x) for the local parameter pi of x."""
    v = _valuation(f, pt)
    if pt.is_infinity:
        return v, f.num[-1] / f.den[-1]
    num, den = f.num, f.den
    pi = pt.poly
    if v > 0:
        num = P.divmod_(num, P.power(pi, v, f.field))[0]
    elif v < 0:
        den = P.divmod_(den, P.power(pi, -v, f.field))[0]
    z = _root(pt)
    return v, P.evaluate(num, z) / P.evaluate(den, z)


def _points_of(f: RationalFunction, curve: OpenCurve) -> list[tuple[ClosedPoint, int]]:
    return [(p, m) for p, m in divisor_of(f).terms if curve.contains(p)]


def reciprocity_sum(a: Section, f: RationalFunction) -> GroupValue:
    """sum_{x in C} v_x(f) Tr_{x/F} a(x) in a's group at Spec F."""
    F = a.curve.field
    if a.functor.kind is Kind.GA:
        acc = F.zero()
        for pt, v in _points_of(f, a.curve):
            val = residue_value(a.function, pt)
            if val is None:
                raise ReciprocityError(f"section is not regular at {pt}")
            acc = acc + trace(val, F) * F.scalar(v)
        return GroupValue(a.functor, F, acc)
    acc = F.one()
    for pt, v in _points_of(f, a.curve):
        val = residue_value(a.function, pt)
        if val is None or val.is_zero():
            raise ReciprocityError(f"section is not invertible at {pt}")
        acc = acc * norm(val, F) ** v
    return GroupValue(a.functor, F, acc)


# --- boundary oracles ----------------------------------------------------------------

def tame_symbol(a: RationalFunction, f: RationalFunction, pt: ClosedPoint) -> FieldElem:
    """(a, f)_x = (-1)^{v(a)v(f)} a^{v(f)} / f^{v(a)} at x, in the residue field."""
    va, ua = _unit_value(a, pt)
    vf, uf = _unit_value(f, pt)
    sign = -1 if (va * vf) % 2 else 1
    out = ua ** vf / uf ** va
    return -out if sign < 0 else out


def weil_oracle(a: Section, f: RationalFunction) -> FieldElem:
    """prod over removed points of N(tame symbol)^{-1}."""
    F = a.curve.field
    acc = F.one()
    for pt in a.curve.removed:
        acc = acc * norm(tame_symbol(a.function, f, pt), F).inverse()
    return acc


def _laurent_coeff(num: tuple, den: tuple, k: int, field: FieldDesc) -> FieldElem:
    """Coefficient of u^k in num(u)/den(u) as a Laurent series at u = 0."""
    e = 0
    while den and den[0].is_zero():
        den, e = den[1:], e + 1
    o = 0
    while num and num[0].is_zero():
        num, o = num[1:], o + 1
    n = k + e - o  # needed coefficient index in the power series num/den
    if n < 0 or not num:
        return field.zero()
    inv0 = den[0].inverse()
    series: list[FieldElem] = []
    for i in range(n + 1):
        c = num[i] if i < len(num) else field.zero()
        for j in range(1, min(i, len(den) - 1) + 1):
            c = c - den[j] * series[i - j]
        series.append(c * inv0)
    return series[n]


def _shift(a: tuple, c: FieldElem) -> tuple:
    """a(u + c) as a polynomial in u."""
    out: tuple = ()
    lin = (c, c.field.one())
    for coef in reversed(a):
        out = P.add(P.mul(out, lin), (embed(coef, c.field),) if not coef.is_zero() else ())
    return out


def residue(num: tuple, den: tuple, pt: ClosedPoint) -> FieldElem:
    """Res_x of (num/den) dt, traced to the base field."""
    F = pt.field
    if pt.is_infinity:
        # t = 1/s, dt = -ds/s^2
        dn, dd = P.degree(num), P.degree(den)
        rn, rd = P.reverse(num), P.reverse(den)
        # num/den = s^{dd-dn} rn/rd; times -s^{-2}
        shift = dd - dn - 2
        return -_laurent_coeff(rn, rd, -1 - shift, F)
    z = _root(pt)
    E = z.field
    c = _laurent_coeff(_shift(P.change_field(num, E), z), _shift(P.change_field(den, E), z), -1, E)
    return trace(c, F)


def residue_oracle(a: Section, f: RationalFunction) -> FieldElem:
    """-sum over removed points of Res(a df/f)."""
    F = a.curve.field
    A, B = f.num, f.den
    dA, dB = P.derivative(A), P.derivative(B)
    wn = P.mul(a.function.num, P.sub(P.mul(dA, B), P.mul(A, dB)))
    wd = P.mul(a.function.den, P.mul(A, B))
    acc = F.zero()
    if wn:
        for pt in a.curve.removed:
            acc = acc - residue(wn, wd, pt)
    return acc


def oracle_value(a: Section, f: RationalFunction) -> GroupValue:
    F = a.curve.field
    val = residue_oracle(a, f) if a.functor.kind is Kind.GA else weil_oracle(a, f)
    return GroupValue(a.functor, F, val)


# --- test functions and conductors -----------------------------------------------------

def _finite_modulus(D: Divisor) -> tuple:
    F = D.field
    out = P.const(F, 1)
    for pt, m in D.terms:
        if not pt.is_infinity:
            out = P.mul(out, P.power(pt.poly, m, F))
    return out


def _all_polys(F: FieldDesc, max_deg: int) -> Iterator[tuple]:
    """Nonzero polynomials of degree <= max_deg, by degree then coefficients."""
    elems = list(F.elements())
    for d in range(max_deg + 1):
        for low in itertools.product(elems, repeat=d):
            for lead in elems[1:]:
                yield tuple(low) + (lead,)


def congruent_functions(D: Divisor, limit: int = 120, max_den_degree: int = 6) -> list[RationalFunction]:
    """f = (k + M g)/k with f = 1 mod D.

    k is monic and coprime to the finite part M of D, g is nonzero, and
    deg(M g) <= deg k - m_inf(D) handles the point at infinity.  Functions are
    produced in a fixed order and deduplicated.
    """
    F = D.field
    M = _finite_modulus(D)
    m_inf = sum(m for p, m in D.terms if p.is_infinity)
    seen: set = set()
    out: list[RationalFunction] = []
    one = P.const(F, 1)
    for dk in range(max_den_degree + 1):
        room = dk - m_inf - P.degree(M)
        if room < 0:
            continue
        for k in P.monic_polys(F, dk):
            if P.gcd(k, M) != one:
                continue
            for g in _all_polys(F, room):
                num = P.add(k, P.mul(M, g))
                if not num:
                    continue
                f = RationalFunction.make(num, k)
                if P.degree(f.num) == 0 and P.degree(f.den) == 0:
                    continue
                if f in seen:
                    continue
                seen.add(f)
                out.append(f)
                if len(out) >= limit:
                    return out
    return out


@dataclass
class InstanceResult:
    function: RationalFunction
    value: GroupValue
    oracle: GroupValue

    @property
    def vanishes(self) -> bool:
        return self.value.is_zero()

    @property
    def oracle_agrees(self) -> bool:
        return self.value == self.oracle


def check_instances(a: Section, D: Divisor, limit: int = 120) -> list[InstanceResult]:
    out = []
    for f in congruent_functions(D, limit):
        if not check_congruence(f, D):
            raise ReciprocityError(f"test function {f} violates the congruence mod {D}")
        out.append(InstanceResult(f, reciprocity_sum(a, f), oracle_value(a, f)))
    return out


def _candidate_moduli(curve: OpenCurve, bound: int) -> list[Divisor]:
    pts = curve.removed
    cands = []
    # every boundary point appears: f must be a unit congruent to 1 near each of them
    for mults in itertools.product(range(1, bound + 1), repeat=len(pts)):
        D = Divisor.from_terms(curve.field, [(p, m) for p, m in zip(pts, mults)])
        cands.append((sum(p.degree * m for p, m in zip(pts, mults)), mults, D))
    cands.sort(key=lambda c: (c[0], c[1]))
    return [D for _, _, D in cands]


@dataclass
class ConductorResult:
    conductor: Divisor | None
    tried: list[tuple[Divisor, int, int]]  # (D, instances, failures)
    instances: list[InstanceResult]

    @property
    def found(self) -> bool:
        return self.conductor is not None


def find_conductor(a: Section, search_bound: int = 3, limit: int = 120) -> ConductorResult:
    """Least D (by degree, then multiplicities) with vanishing on all enumerated f.

    Minimality is relative to the enumerated family only.
    """
    tried = []
    for D in _candidate_moduli(a.curve, search_bound):
        res = check_instances(a, D, limit)
        bad = sum(1 for r in res if not r.vanishes)
        tried.append((D, len(res), bad))
        if res and not bad:
            return ConductorResult(D, tried, res)
    return ConductorResult(None, tried, [])
