"""Univariate polynomials over a finite field, as trimmed tuples (low degree first).

The zero polynomial is the empty tuple.  Coefficients are `FieldElem` values
of one common field, passed explicitly where a polynomial may be empty.
"""

from __future__ import annotations

import itertools
import re
from functools import lru_cache
from typing import Iterator, Sequence

from .ffield import FieldDesc, FieldElem, FieldError, embed

Poly = tuple  # tuple[FieldElem, ...]


def trim(a: Sequence[FieldElem]) -> Poly:
    a = list(a)
    while a and a[-1].is_zero():
        a.pop()
    return tuple(a)


def const(field: FieldDesc, c) -> Poly:
    c = c if isinstance(c, FieldElem) else field.scalar(c)
    return trim([c])


def monomial(field: FieldDesc, k: int) -> Poly:
    return tuple([field.zero()] * k + [field.one()])


def degree(a: Poly) -> int:
    return len(a) - 1


def add(a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    return trim([x + y for x, y in zip(a, b)] + list(a[len(b):]))


def neg(a: Poly) -> Poly:
    return tuple(-x for x in a)


def sub(a: Poly, b: Poly) -> Poly:
    return add(a, neg(b))


def mul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    f = a[0].field
    out = [f.zero()] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return trim(out)


def scale(a: Poly, c: FieldElem) -> Poly:
    return trim([x * c for x in a])


def power(a: Poly, n: int, field: FieldDesc) -> Poly:
    out = const(field, 1)
    for _ in range(n):
        out = mul(out, a)
    return out


def divmod_(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    inv = b[-1].inverse()
    db = len(b) - 1
    if len(a) - 1 < db:
        return (), trim(a)
    q = [b[0].field.zero()] * (len(a) - db)
    while len(a) - 1 >= db and a:
        c = a[-1] * inv
        s = len(a) - 1 - db
        q[s] = c
        for i, bc in enumerate(b):
            a[s + i] = a[s + i] - c * bc
        a = list(trim(a))
    return trim(q), trim(a)


def mod(a: Poly, b: Poly) -> Poly:
    return divmod_(a, b)[1]


def monic(a: Poly) -> Poly:
    return scale(a, a[-1].inverse()) if a else a


def gcd(a: Poly, b: Poly) -> Poly:
    while b:
        a, b = b, mod(a, b)
    return monic(a)


def xgcd(a: Poly, b: Poly, field: FieldDesc) -> tuple[Poly, Poly, Poly]:
    """(g, s, t) with s*a + t*b = g monic."""
    r0, r1 = a, b
    s0, s1 = const(field, 1), ()
    t0, t1 = (), const(field, 1)
    while r1:
        q, r = divmod_(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1))
        t0, t1 = t1, sub(t0, mul(q, t1))
    if not r0:
        return (), s0, t0
    inv = r0[-1].inverse()
    return scale(r0, inv), scale(s0, inv), scale(t0, inv)


def inverse_mod(a: Poly, m: Poly, field: FieldDesc) -> Poly:
    g, s, _ = xgcd(mod(a, m), m, field)
    if g != const(field, 1):
        raise ZeroDivisionError("not invertible modulo m")
    return mod(s, m)


def evaluate(a: Poly, x: FieldElem) -> FieldElem:
    acc = x.field.zero()
    for c in reversed(a):
        acc = acc * x + embed(c, x.field)
    return acc


def derivative(a: Poly) -> Poly:
    return trim([c * i for i, c in enumerate(a)][1:])


def reverse(a: Poly, n: int | None = None) -> Poly:
    """s^n a(1/s); n defaults to deg a."""
    n = degree(a) if n is None else n
    f = a[0].field
    padded = list(a) + [f.zero()] * (n + 1 - len(a))
    return trim(padded[::-1])


def change_field(a: Poly, target: FieldDesc) -> Poly:
    return tuple(embed(c, target) for c in a)


def monic_polys(field: FieldDesc, deg: int) -> Iterator[Poly]:
    """Monic polynomials of the given degree, lowest coefficient most significant."""
    elems = list(field.elements())
    for low in itertools.product(elems, repeat=deg):
        yield tuple(low) + (field.one(),)


@lru_cache(maxsize=None)
def monic_irreducibles(field: FieldDesc, deg: int) -> tuple[Poly, ...]:
    if deg == 1:
        return tuple(monic_polys(field, 1))
    smaller = [g for k in range(1, deg // 2 + 1) for g in monic_irreducibles(field, k)]
    return tuple(f for f in monic_polys(field, deg)
                 if all(mod(f, g) for g in smaller))


def count_irreducibles(q: int, deg: int) -> int:
    """Gauss's formula for monic irreducibles of degree deg over F_q."""
    total = 0
    for d in range(1, deg + 1):
        if deg % d == 0:
            total += _mobius(deg // d) * q**d
    return total // deg


def _mobius(n: int) -> int:
    out, f = 1, 2
    while f * f <= n:
        if n % f == 0:
            n //= f
            if n % f == 0:
                return 0
            out = -out
        f += 1
    return -out if n > 1 else out


def is_irreducible(f: Poly) -> bool:
    field = f[0].field
    return all(mod(f, g) for k in range(1, degree(f) // 2 + 1) for g in monic_irreducibles(field, k))


def factor(f: Poly) -> list[tuple[Poly, int]]:
    """Factor a nonzero polynomial into monic irreducibles by trial division."""
    if not f:
        raise ValueError("cannot factor the zero polynomial")
    field = f[0].field
    f = monic(f)
    out = []
    k = 1
    while degree(f) > 0:
        if 2 * k > degree(f):
            out.append((f, 1))
            break
        for g in monic_irreducibles(field, k):
            e = 0
            while True:
                q, r = divmod_(f, g)
                if r:
                    break
                f, e = q, e + 1
            if e:
                out.append((g, e))
        k += 1
    merged: dict[Poly, int] = {}
    for g, e in out:
        merged[g] = merged.get(g, 0) + e
    return sorted(merged.items(), key=lambda ge: (degree(ge[0]), [c.coeffs for c in ge[0]]))


# --- text form ---------------------------------------------------------------

def format_poly(a: Poly, var: str = "t") -> str:
    if not a:
        return "0"
    terms = []
    for k in range(len(a) - 1, -1, -1):
        c = a[k]
        if c.is_zero():
            continue
        cs = str(c.coeffs[0]) if c.field.d == 1 else "[" + ",".join(map(str, c.coeffs)) + "]"
        if k == 0:
            terms.append(cs)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            terms.append(mono if cs == "1" else f"{cs}*{mono}")
    return "+".join(terms)


_TERM = re.compile(r"^(?:(-?\d+)\*?)?(t(?:\^(\d+))?)?$")


def parse_poly(text: str, field: FieldDesc) -> Poly:
    """Parse sums like 't^2+2*t+1' (integer coefficients) over `field`."""
    s = text.replace(" ", "").replace("-", "+-")
    out: dict[int, int] = {}
    for term in filter(None, s.split("+")):
        m = _TERM.match(term)
        if not m or (m.group(1) is None and m.group(2) is None):
            if term == "-t" or term.startswith("-t"):
                m = _TERM.match("-1*" + term[1:])
            if not m:
                raise FieldError(f"cannot parse polynomial term {term!r} in {text!r}")
        c = int(m.group(1)) if m.group(1) is not None else 1
        k = 0 if m.group(2) is None else int(m.group(3) or 1)
        out[k] = out.get(k, 0) + c
    deg = max(out) if out else 0
    return trim([field.scalar(out.get(k, 0)) for k in range(deg + 1)])
