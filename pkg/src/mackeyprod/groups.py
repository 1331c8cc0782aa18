"""Value groups M(y) of the implemented Mackey functors.

Four commutative algebraic groups over a base field F are supported: the
additive group GA, the multiplicative group GM, generalized Jacobians of P^1
with a modulus (GENJAC) and elliptic curves in short Weierstrass form
(ELLIPTIC).  The constant functor Z (CONST) is admitted for unit-law checks.

For a finite point y = Spec E over F each functor gives a finite abelian
group (CONST gives Z) with pull-back along E -> E' (base change of
coordinates) and push-forward E' -> E (trace, norm, or the sum of Galois
conjugates under the group law).
"""

from __future__ import annotations

import itertools
from math import gcd
import threading
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any, Callable, Hashable, Iterable, Sequence

from . import poly as P
from .divisor import ClosedPoint, Divisor
from .ffield import (FieldDesc, FieldElem, FieldError, embed, frobenius_p, norm,
                     primitive_element, restrict, trace)
from .zlinalg import IntMatrix, _snf_dense

ORDER_CAP = 10**5


class Kind(str, Enum):
    GA = "GA"
    GM = "GM"
    GENJAC = "GENJAC"
    ELLIPTIC = "ELL"
    CONST = "Z"


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class ValueFunctor:
    kind: Kind
    base: FieldDesc
    modulus: Divisor | None = None
    curve: tuple[FieldElem, FieldElem] | None = None

    def __post_init__(self):
        if self.kind is Kind.ELLIPTIC:
            a, b = self.curve
            if self.base.p in (2, 3):
                raise GroupError("short Weierstrass curves need characteristic >= 5")
            if (4 * a**3 + 27 * b**2).is_zero():
                raise GroupError(f"singular curve: 4a^3 + 27b^2 = 0 for a={a}, b={b}")
        if self.kind is Kind.GENJAC:
            if self.modulus is None or self.modulus.is_empty():
                raise GroupError("GENJAC needs a modulus with nonempty support")

    @property
    def label(self) -> str:
        if self.kind is Kind.GENJAC:
            return f"GENJAC:{self.modulus}"
        if self.kind is Kind.ELLIPTIC:
            a, b = self.curve
            return f"ELL:{_fmt(a)},{_fmt(b)}"
        return self.kind.value

    @property
    def is_finite(self) -> bool:
        return self.kind is not Kind.CONST

    def __str__(self) -> str:
        return self.label


def _fmt(c: FieldElem) -> str:
    return str(c.coeffs[0]) if c.field.d == 1 else "[" + ",".join(map(str, c.coeffs)) + "]"


def GA(base: FieldDesc) -> ValueFunctor:
    return ValueFunctor(Kind.GA, base)


def GM(base: FieldDesc) -> ValueFunctor:
    return ValueFunctor(Kind.GM, base)


def CONST(base: FieldDesc) -> ValueFunctor:
    return ValueFunctor(Kind.CONST, base)


def genjac(modulus: Divisor) -> ValueFunctor:
    return ValueFunctor(Kind.GENJAC, modulus.field, modulus=modulus)


def elliptic(base: FieldDesc, a, b) -> ValueFunctor:
    a = a if isinstance(a, FieldElem) else base.scalar(a)
    b = b if isinstance(b, FieldElem) else base.scalar(b)
    return ValueFunctor(Kind.ELLIPTIC, base, curve=(a, b))


@dataclass(frozen=True)
class GroupValue:
    functor: ValueFunctor
    point: FieldDesc
    payload: Any

    def __add__(self, other: "GroupValue") -> "GroupValue":
        _same(self, other)
        return GroupValue(self.functor, self.point, _law(self.functor).add(self.functor, self.point, self.payload, other.payload))

    def __neg__(self) -> "GroupValue":
        return GroupValue(self.functor, self.point, _law(self.functor).neg(self.functor, self.point, self.payload))

    def __sub__(self, other: "GroupValue") -> "GroupValue":
        return self + (-other)

    def __rmul__(self, n: int) -> "GroupValue":
        return GroupValue(self.functor, self.point, _scalar_mul(self.functor, self.point, self.payload, n))

    def is_zero(self) -> bool:
        return self.payload == _law(self.functor).zero(self.functor, self.point)


def _same(u: GroupValue, v: GroupValue) -> None:
    if u.functor != v.functor or u.point != v.point:
        raise GroupError(f"values of {u.functor}@{u.point!r} and {v.functor}@{v.point!r} do not combine")


def _scalar_mul(functor: ValueFunctor, point: FieldDesc, a, n: int):
    law = _law(functor)
    if n < 0:
        a, n = law.neg(functor, point, a), -n
    out = law.zero(functor, point)
    while n:
        if n & 1:
            out = law.add(functor, point, out, a)
        a = law.add(functor, point, a, a)
        n >>= 1
    return out


# --- group laws ----------------------------------------------------------------
# Every law works on raw payloads at a point E.  `frob(a, k)` applies the
# p-power Frobenius k times to all coordinates; `down(a, E', E)` restricts
# coordinates that are known to lie in E.

class _AdditiveLaw:
    @staticmethod
    def zero(fn, E):
        return E.zero()

    @staticmethod
    def add(fn, E, a, b):
        return a + b

    @staticmethod
    def neg(fn, E, a):
        return -a

    @staticmethod
    def valid(fn, E, a):
        return isinstance(a, FieldElem) and a.field == E

    @staticmethod
    def up(fn, a, E):
        return embed(a, E)

    @staticmethod
    def frob(fn, a, k):
        return frobenius_p(a, k)

    @staticmethod
    def push(fn, a, E):
        return trace(a, E)


class _MultiplicativeLaw(_AdditiveLaw):
    @staticmethod
    def zero(fn, E):
        return E.one()

    @staticmethod
    def add(fn, E, a, b):
        return a * b

    @staticmethod
    def neg(fn, E, a):
        return a.inverse()

    @staticmethod
    def valid(fn, E, a):
        return isinstance(a, FieldElem) and a.field == E and not a.is_zero()

    @staticmethod
    def push(fn, a, E):
        return norm(a, E)


class _ConstLaw:
    @staticmethod
    def zero(fn, E):
        return 0

    @staticmethod
    def add(fn, E, a, b):
        return a + b

    @staticmethod
    def neg(fn, E, a):
        return -a

    @staticmethod
    def valid(fn, E, a):
        return isinstance(a, int)

    @staticmethod
    def up(fn, a, E):
        return a

    @staticmethod
    def frob(fn, a, k):
        return a

    @staticmethod
    def push_degree(fn, a, deg):
        return a * deg


class _EllipticLaw:
    """Affine points (x, y) with y^2 = x^3 + a x + b; None is the origin."""

    @staticmethod
    def coeffs(fn, E):
        a, b = fn.curve
        return embed(a, E), embed(b, E)

    @staticmethod
    def zero(fn, E):
        return None

    @classmethod
    def valid(cls, fn, E, pt):
        if pt is None:
            return True
        x, y = pt
        a, b = cls.coeffs(fn, E)
        return x.field == E and y * y == x * x * x + a * x + b

    @classmethod
    def add(cls, fn, E, u, v):
        if u is None:
            return v
        if v is None:
            return u
        (x1, y1), (x2, y2) = u, v
        if x1 == x2:
            if (y1 + y2).is_zero():
                return None
            a, _ = cls.coeffs(fn, E)
            lam = (3 * x1 * x1 + a) / (2 * y1)
        else:
            lam = (y2 - y1) / (x2 - x1)
        x3 = lam * lam - x1 - x2
        return (x3, lam * (x1 - x3) - y1)

    @staticmethod
    def neg(fn, E, u):
        return None if u is None else (u[0], -u[1])

    @staticmethod
    def up(fn, u, E):
        return None if u is None else (embed(u[0], E), embed(u[1], E))

    @staticmethod
    def frob(fn, u, k):
        return None if u is None else (frobenius_p(u[0], k), frobenius_p(u[1], k))

    @classmethod
    def push(cls, fn, u, E):
        if u is None:
            return None
        big = u[0].field
        total, conj = None, u
        for _ in range(big.d // E.d):
            total = cls.add(fn, big, total, conj)
            conj = cls.frob(fn, conj, E.d)
        return None if total is None else (restrict(total[0], E), restrict(total[1], E))


class _GenJacLaw:
    """Tuples of residues, one per support point P of the modulus, in E[t]/m_P.

    Each residue is a coefficient tuple of length deg m_P.  Classes modulo
    the diagonal scalars E^x are normalised so that the first nonzero
    coordinate of the flattened tuple equals 1.
    """

    @staticmethod
    def moduli(fn, E):
        return _genjac_moduli(fn.modulus, E)

    @staticmethod
    def normalize(u):
        for comp in u:
            for c in comp:
                if not c.is_zero():
                    inv = c.inverse()
                    return tuple(tuple(x * inv for x in comp2) for comp2 in u)
        raise GroupError("zero is not a unit")

    @staticmethod
    def zero(fn, E):
        return tuple(tuple([E.one()] + [E.zero()] * (P.degree(m) - 1)) for m in _genjac_moduli(fn.modulus, E))

    @classmethod
    def add(cls, fn, E, u, v):
        out = []
        for m, a, b in zip(cls.moduli(fn, E), u, v):
            r = P.mod(P.mul(P.trim(a), P.trim(b)), m)
            out.append(_pad(r, P.degree(m), E))
        return cls.normalize(out)

    @classmethod
    def neg(cls, fn, E, u):
        out = []
        for m, a in zip(cls.moduli(fn, E), u):
            out.append(_pad(P.inverse_mod(P.trim(a), m, E), P.degree(m), E))
        return cls.normalize(out)

    @classmethod
    def valid(cls, fn, E, u):
        try:
            mods = cls.moduli(fn, E)
            if len(u) != len(mods):
                return False
            for m, a in zip(mods, u):
                if len(a) != P.degree(m) or any(c.field != E for c in a):
                    return False
                P.inverse_mod(P.trim(a), m, E)
            return cls.normalize(u) == u
        except (ZeroDivisionError, GroupError):
            return False

    @classmethod
    def up(cls, fn, u, E):
        return tuple(tuple(embed(c, E) for c in comp) for comp in u)

    @staticmethod
    def frob(fn, u, k):
        return tuple(tuple(frobenius_p(c, k) for c in comp) for comp in u)

    @classmethod
    def push(cls, fn, u, E):
        big = u[0][0].field
        mods = cls.moduli(fn, big)
        total = cls.zero(fn, big)
        conj = u
        for _ in range(big.d // E.d):
            total = cls.add(fn, big, total, conj)
            conj = cls.frob(fn, conj, E.d)
        return cls.normalize([tuple(restrict(c, E) for c in comp) for comp in total])


def _pad(r: tuple, n: int, E: FieldDesc) -> tuple:
    return tuple(r) + (E.zero(),) * (n - len(r))


@lru_cache(maxsize=None)
def _genjac_moduli(modulus: Divisor, E: FieldDesc) -> tuple:
    return tuple(pt.local_modulus(m, over=E) for pt, m in modulus.terms)


_LAWS = {
    Kind.GA: _AdditiveLaw,
    Kind.GM: _MultiplicativeLaw,
    Kind.CONST: _ConstLaw,
    Kind.ELLIPTIC: _EllipticLaw,
    Kind.GENJAC: _GenJacLaw,
}


def _law(fn: ValueFunctor):
    return _LAWS[fn.kind]


def _check_point(fn: ValueFunctor, E: FieldDesc) -> None:
    if not fn.base.divides(E):
        raise GroupError(f"{E!r} is not a finite point over {fn.base!r}")


def value(fn: ValueFunctor, E: FieldDesc, payload) -> GroupValue:
    """Validated GroupValue constructor."""
    _check_point(fn, E)
    if fn.kind is Kind.GENJAC and payload is not None:
        try:
            payload = _GenJacLaw.normalize(payload)
        except GroupError:
            pass
    if not _law(fn).valid(fn, E, payload):
        raise GroupError(f"{payload!r} is not an element of {fn}({E!r})")
    return GroupValue(fn, E, payload)


def zero(fn: ValueFunctor, E: FieldDesc) -> GroupValue:
    return GroupValue(fn, E, _law(fn).zero(fn, E))


def pullback(fn: ValueFunctor, target: FieldDesc, a: GroupValue) -> GroupValue:
    """j^* along Spec(target) -> Spec(a.point)."""
    if not a.point.divides(target):
        raise GroupError(f"cannot pull back from {a.point!r} to {target!r}")
    if a.point == target:
        return a
    return GroupValue(fn, target, _law(fn).up(fn, a.payload, target))


def pushforward(fn: ValueFunctor, target: FieldDesc, a: GroupValue) -> GroupValue:
    """j_* along Spec(a.point) -> Spec(target)."""
    _check_point(fn, target)
    if not target.divides(a.point):
        raise GroupError(f"cannot push forward from {a.point!r} to {target!r}")
    if a.point == target:
        return a
    law = _law(fn)
    if fn.kind is Kind.CONST:
        return GroupValue(fn, target, a.payload * (a.point.d // target.d))
    return GroupValue(fn, target, law.push(fn, a.payload, target))


def frobenius_pullback(fn: ValueFunctor, over: FieldDesc, a: GroupValue) -> GroupValue:
    """sigma^* for the Frobenius automorphism of a.point over `over`."""
    return GroupValue(fn, a.point, _law(fn).frob(fn, a.payload, over.d))


def frobenius_pushforward(fn: ValueFunctor, over: FieldDesc, a: GroupValue) -> GroupValue:
    """sigma_* = (sigma^*)^{-1}."""
    k = a.point.d // over.d
    return GroupValue(fn, a.point, _law(fn).frob(fn, a.payload, over.d * (k - 1)))


# --- enumeration --------------------------------------------------------------

def enumerate_elements(fn: ValueFunctor, E: FieldDesc) -> list:
    """All payloads of fn(E) in a deterministic order."""
    _check_point(fn, E)
    if fn.kind is Kind.GA:
        return list(E.elements())
    if fn.kind is Kind.GM:
        return [a for a in E.elements() if not a.is_zero()]
    if fn.kind is Kind.ELLIPTIC:
        a, b = _EllipticLaw.coeffs(fn, E)
        roots: dict[FieldElem, list[FieldElem]] = {}
        for y in E.elements():
            roots.setdefault(y * y, []).append(y)
        pts: list = [None]
        for x in E.elements():
            for y in roots.get(x * x * x + a * x + b, []):
                pts.append((x, y))
        return pts
    if fn.kind is Kind.GENJAC:
        mods = _genjac_moduli(fn.modulus, E)
        sizes = [P.degree(m) for m in mods]
        n = sum(sizes)
        if E.size**n > 50 * ORDER_CAP:
            raise GroupError(f"{fn}({E!r}) is too large to enumerate")
        elems = list(E.elements())
        out = []
        for flat in itertools.product(elems, repeat=n):
            first = next((c for c in flat if not c.is_zero()), None)
            if first is None or first != E.one():
                continue
            comps, i = [], 0
            for s in sizes:
                comps.append(tuple(flat[i:i + s]))
                i += s
            if all(P.gcd(P.trim(c), m) == P.const(E, 1) for c, m in zip(comps, mods)):
                out.append(tuple(comps))
        return out
    raise GroupError(f"{fn} has infinitely many values")


# --- abelian structures ---------------------------------------------------------

@dataclass
class AbelianStructure:
    """A finitely generated abelian group with invariant factors d1 | d2 | ...

    A factor 0 stands for a free summand Z.  `generators` realise the
    decomposition, and `dlog` maps an element to its coordinates.
    """

    invariant_factors: list[int]
    generators: list
    table: dict | None = None
    dlog_fn: Callable[[Any], tuple[int, ...]] | None = None

    @property
    def order(self) -> int | None:
        out = 1
        for d in self.invariant_factors:
            if d == 0:
                return None
            out *= d
        return out

    def dlog(self, x) -> tuple[int, ...]:
        if self.dlog_fn is not None:
            return self.dlog_fn(x)
        return self.table[x]


def abelian_structure(elements: Sequence[Hashable], add: Callable, identity: Hashable,
                      cap: int = ORDER_CAP) -> AbelianStructure:
    """Invariant factors of a finite abelian group given by enumeration and law.

    Generators are adjoined in enumeration order; each new generator g gets the
    relation m*g = (element of the current subgroup), and the Smith form of the
    collected relations yields the decomposition.
    """
    if len(elements) > cap:
        raise GroupError(f"group order {len(elements)} exceeds cap {cap}")
    gens: list = []
    rels: list[tuple[int, ...]] = []
    H: dict = {identity: ()}
    for g in elements:
        if g in H:
            continue
        cur, m = g, 1
        while cur not in H:
            cur = add(cur, g)
            m += 1
            if m > len(elements):
                raise GroupError("group law failure: element of unbounded order")
        rels.append(tuple(-c for c in H[cur]) + (m,))
        gens.append(g)
        newH = {}
        for h, vec in H.items():
            x = h
            for i in range(m):
                newH[x] = vec + (i,)
                x = add(x, g)
        H = newH
    if len(H) != len(set(elements)) or any(e not in H for e in elements):
        raise GroupError("group law failure: enumeration is not closed under the law")
    k = len(gens)
    if k == 0:
        return AbelianStructure([], [], {identity: ()})
    dense = [list(r) + [0] * (k - len(r)) for r in rels]
    S, _, V = _snf_dense(dense, track=True)
    diag = [S[i][i] for i in range(k)]
    keep = [i for i in range(k) if diag[i] != 1]
    table = {}
    for h, vec in H.items():
        vec = vec + (0,) * (k - len(vec))
        table[h] = tuple(sum(vec[r] * V[r][i] for r in range(k)) % diag[i] for i in keep)
    factors = [diag[i] for i in keep]
    reverse = {coords: h for h, coords in table.items()}
    generators = [reverse[tuple(int(i == j) for j in range(len(keep)))] for i in range(len(keep))]
    return AbelianStructure(factors, generators, table)


_structure_lock = threading.Lock()
_structure_cache: dict = {}


def value_group(fn: ValueFunctor, E: FieldDesc) -> AbelianStructure:
    """The structure of fn(E); generators and dlog act on GroupValue objects."""
    _check_point(fn, E)
    key = (fn, E)
    hit = _structure_cache.get(key)
    if hit is not None:
        return hit
    st = _build_structure(fn, E)
    with _structure_lock:
        return _structure_cache.setdefault(key, st)


def _build_structure(fn: ValueFunctor, E: FieldDesc) -> AbelianStructure:
    if fn.kind is Kind.CONST:
        return AbelianStructure([0], [GroupValue(fn, E, 1)], dlog_fn=lambda v: (v.payload,))
    if fn.kind is Kind.GA:
        p = E.p
        gens = [GroupValue(fn, E, b) for b in E.basis()]
        return AbelianStructure([p] * E.d, gens, dlog_fn=lambda v: v.payload.coeffs)
    if fn.kind is Kind.GM:
        n = E.size - 1
        if n == 1:
            return AbelianStructure([], [], dlog_fn=lambda v: ())
        g = primitive_element(E)
        logs = _gm_log_table(E)
        return AbelianStructure([n], [GroupValue(fn, E, g)], dlog_fn=lambda v: (logs[v.payload],))
    law = _law(fn)
    elems = enumerate_elements(fn, E)
    st = abelian_structure(elems, lambda u, v: law.add(fn, E, u, v), law.zero(fn, E))
    table = st.table
    return AbelianStructure(st.invariant_factors, [GroupValue(fn, E, g) for g in st.generators],
                            table, dlog_fn=lambda v: table[v.payload])


@lru_cache(maxsize=None)
def _gm_log_table(E: FieldDesc) -> dict:
    g = primitive_element(E)
    out, x = {}, E.one()
    for k in range(E.size - 1):
        out[x] = k
        x = x * g
    return out


def genjac_closed_order(modulus: Divisor, q: int) -> int:
    """|J_{P^1, D}(F_q)| = prod q^{deg P (e-1)} (q^{deg P} - 1) / (q - 1)."""
    num = 1
    for pt, e in modulus.terms:
        qd = q**pt.degree
        num *= qd ** (e - 1) * (qd - 1)
    return num // (q - 1)


# --- JSON ------------------------------------------------------------------------

def payload_json(v: GroupValue):
    pl = v.payload
    kind = v.functor.kind
    if kind in (Kind.GA, Kind.GM):
        return list(pl.coeffs)
    if kind is Kind.CONST:
        return pl
    if kind is Kind.ELLIPTIC:
        return "O" if pl is None else [list(pl[0].coeffs), list(pl[1].coeffs)]
    return [[list(c.coeffs) for c in comp] for comp in pl]


def value_json(v: GroupValue) -> dict:
    return {"functor": v.functor.label, "point": str(v.point), "payload": payload_json(v)}


def structure_json(st: AbelianStructure) -> dict:
    return {"invariant_factors": list(st.invariant_factors), "order": st.order,
            "generators": [value_json(g) if isinstance(g, GroupValue) else repr(g) for g in st.generators]}


def payload_from_json(fn: ValueFunctor, E: FieldDesc, data) -> GroupValue:
    """Inverse of `payload_json`; the result is validated."""
    if fn.kind in (Kind.GA, Kind.GM):
        return value(fn, E, E.element(data))
    if fn.kind is Kind.CONST:
        return value(fn, E, int(data))
    if fn.kind is Kind.ELLIPTIC:
        if data in ("O", None):
            return value(fn, E, None)
        return value(fn, E, (E.element(data[0]), E.element(data[1])))
    return value(fn, E, tuple(tuple(E.element(c) for c in comp) for comp in data))


def solve_multiple(fn: ValueFunctor, E: FieldDesc, target: GroupValue, m: int) -> GroupValue | None:
    """Some b with m*b = target in fn(E), or None if target is not m-divisible."""
    st = value_group(fn, E)
    coords = st.dlog(target)
    out = zero(fn, E)
    for c, d, g in zip(coords, st.invariant_factors, st.generators):
        # solve m*x = c mod d
        h = gcd(m, d)
        if c % h:
            return None
        x = (c // h) * pow(m // h, -1, d // h) % (d // h) if d // h > 1 else 0
        out = out + x * g
    return out
