"""Finite fields F_{p^d} in a coherent tower.

Elements are coordinate vectors in the power basis of a canonical defining
polynomial (the lexicographically least monic irreducible, coefficients
compared low degree first).  Embeddings F_{p^a} -> F_{p^b} are fixed once by
a deterministic root choice and cached, so that every symbol identity built
on top of them is reproducible.
"""

from __future__ import annotations

import itertools
import re
import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence


@dataclass
class Caps:
    max_degree: int = 6
    max_size: int = 2**20


CAPS = Caps()


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


# --- polynomials over F_p as tuples, low degree first -------------------------

def _fp_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = [c % p for c in a]
    _fp_trim(a)
    dm = len(m) - 1
    inv = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and a:
        c = a[-1] * inv % p
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        _fp_trim(a)
    return a


def _fp_is_irreducible(poly: Sequence[int], p: int) -> bool:
    d = len(poly) - 1
    for k in range(1, d // 2 + 1):
        for low in itertools.product(range(p), repeat=k):
            if not _fp_mod(poly, list(low) + [1], p):
                return False
    return True


# --- field descriptions -------------------------------------------------------

@dataclass(frozen=True)
class FieldDesc:
    p: int
    d: int
    defining_poly: tuple[int, ...]

    @property
    def size(self) -> int:
        return self.p**self.d

    def __str__(self) -> str:
        return f"{self.p}^{self.d}"

    def __repr__(self) -> str:
        return f"F_{self.p}^{self.d}"

    def zero(self) -> "FieldElem":
        return FieldElem(self, (0,) * self.d)

    def one(self) -> "FieldElem":
        return FieldElem(self, (1,) + (0,) * (self.d - 1))

    def gen(self) -> "FieldElem":
        """The class of x in F_p[x]/(defining_poly)."""
        if self.d == 1:
            return FieldElem(self, (-self.defining_poly[0] % self.p,))
        return FieldElem(self, (0, 1) + (0,) * (self.d - 2))

    def scalar(self, c: int) -> "FieldElem":
        return FieldElem(self, (c % self.p,) + (0,) * (self.d - 1))

    def basis(self) -> list["FieldElem"]:
        return [FieldElem(self, tuple(int(i == j) for j in range(self.d))) for i in range(self.d)]

    def elements(self) -> Iterator["FieldElem"]:
        """All elements in coordinate order (c0 most significant)."""
        for c in itertools.product(range(self.p), repeat=self.d):
            yield FieldElem(self, c)

    def element(self, coeffs: Sequence[int]) -> "FieldElem":
        c = [int(x) % self.p for x in coeffs]
        if len(c) > self.d:
            raise FieldError(f"too many coordinates for {self!r}")
        return FieldElem(self, tuple(c + [0] * (self.d - len(c))))

    def divides(self, other: "FieldDesc") -> bool:
        return self.p == other.p and other.d % self.d == 0


@lru_cache(maxsize=None)
def _canonical_poly(p: int, d: int) -> tuple[int, ...]:
    for low in itertools.product(range(p), repeat=d):
        poly = low + (1,)
        if _fp_is_irreducible(poly, p):
            return poly
    raise FieldError(f"no irreducible polynomial of degree {d} over F_{p}")  # pragma: no cover


@lru_cache(maxsize=None)
def _make_field(p: int, d: int) -> FieldDesc:
    return FieldDesc(p, d, _canonical_poly(p, d))


def make_field(p: int, d: int = 1) -> FieldDesc:
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if not 1 <= d <= CAPS.max_degree:
        raise FieldError(f"degree {d} outside [1, {CAPS.max_degree}]")
    if p**d > CAPS.max_size:
        raise FieldError(f"|F| = {p}^{d} exceeds the size cap {CAPS.max_size}")
    return _make_field(p, d)


def extension(base: FieldDesc, k: int) -> FieldDesc:
    """The unique extension of `base` of relative degree k."""
    return make_field(base.p, base.d * k)


# --- elements -----------------------------------------------------------------

class FieldElem:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldDesc, coeffs: tuple[int, ...]):
        self.field = field
        self.coeffs = coeffs

    def _coerce(self, other) -> "FieldElem":
        if isinstance(other, FieldElem):
            if other.field is not self.field and other.field != self.field:
                raise FieldError(f"mixed fields {self.field!r} and {other.field!r}")
            return other
        if isinstance(other, int):
            return self.field.scalar(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        p = self.field.p
        return FieldElem(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FieldElem(self.field, tuple(-a % p for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        f = self.field
        p, d = f.p, f.d
        if d == 1:
            return FieldElem(f, (self.coeffs[0] * o.coeffs[0] % p,))
        prod = [0] * (2 * d - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    prod[i + j] += a * b
        m = f.defining_poly
        for k in range(2 * d - 2, d - 1, -1):
            c = prod[k] % p
            if c:
                s = k - d
                for i in range(d):
                    prod[s + i] -= c * m[i]
        return FieldElem(f, tuple(c % p for c in prod[:d]))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = self.field.one(), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "FieldElem":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a finite field")
        return self ** (self.field.size - 2)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field.scalar(other)
        if not isinstance(other, FieldElem):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field.p, self.field.d, self.coeffs))

    def __lt__(self, other: "FieldElem") -> bool:
        return self.coeffs < other.coeffs

    def __repr__(self) -> str:
        return format_elem(self)


def format_elem(a: FieldElem) -> str:
    return f"{a.field.p}^{a.field.d}:[{','.join(map(str, a.coeffs))}]"


_ELEM_RE = re.compile(r"^\s*(\d+)\^(\d+)\s*:\s*\[([-\d,\s]*)\]\s*$")


def parse_elem(text: str) -> FieldElem:
    m = _ELEM_RE.match(text)
    if not m:
        raise FieldError(f"cannot parse field element {text!r}; expected 'p^d:[c0,c1,...]'")
    field = make_field(int(m.group(1)), int(m.group(2)))
    body = m.group(3).strip()
    coeffs = [int(c) for c in body.split(",")] if body else []
    return field.element(coeffs)


def parse_field(text: str) -> FieldDesc:
    m = re.match(r"^\s*(\d+)(?:\^(\d+))?\s*$", text)
    if not m:
        raise FieldError(f"cannot parse field {text!r}; expected 'p^d'")
    return make_field(int(m.group(1)), int(m.group(2) or 1))


# --- Frobenius and embeddings -------------------------------------------------

@lru_cache(maxsize=None)
def _frobenius_matrix(field: FieldDesc) -> tuple[tuple[int, ...], ...]:
    # row i: coordinates of (x^i)^p
    return tuple((b**field.p).coeffs for b in field.basis())


def _apply_linear(rows: tuple[tuple[int, ...], ...], a: FieldElem, target: FieldDesc) -> FieldElem:
    p = target.p
    out = [0] * target.d
    for c, row in zip(a.coeffs, rows):
        if c:
            for j, r in enumerate(row):
                out[j] += c * r
    return FieldElem(target, tuple(x % p for x in out))


def frobenius_p(a: FieldElem, times: int = 1) -> FieldElem:
    """a -> a^(p^times), via the F_p-linear Frobenius matrix."""
    f = a.field
    times %= f.d
    if times == 0:
        return a
    rows = _frobenius_matrix(f)
    for _ in range(times):
        a = _apply_linear(rows, a, f)
    return a


def frobenius(a: FieldElem, over: FieldDesc) -> FieldElem:
    """a -> a^|over|, the generator of Gal(a.field / over)."""
    if not over.divides(a.field):
        raise FieldError(f"{over!r} is not a subfield of {a.field!r}")
    return frobenius_p(a, over.d)


@lru_cache(maxsize=None)
def primitive_element(field: FieldDesc) -> FieldElem:
    n = field.size - 1
    qs = prime_factors(n)
    for a in field.elements():
        if a.is_zero():
            continue
        if all(a ** (n // q) != field.one() for q in qs):
            return a
    raise FieldError("no primitive element")  # pragma: no cover


def _poly_eval(poly: Sequence[int], x: FieldElem) -> FieldElem:
    acc = x.field.zero()
    for c in reversed(poly):
        acc = acc * x + c
    return acc


_embed_lock = threading.Lock()
_embed_cache: dict[tuple[FieldDesc, FieldDesc], tuple[tuple[int, ...], ...]] = {}


def _intermediates(src: FieldDesc, dst: FieldDesc) -> list[FieldDesc]:
    return [make_field(src.p, k) for k in range(src.d + 1, dst.d)
            if k % src.d == 0 and dst.d % k == 0]


def _compute_embedding(src: FieldDesc, dst: FieldDesc) -> tuple[tuple[int, ...], ...]:
    if src.d == 1:
        return (dst.one().coeffs,)
    # image of the generator: least root of src.defining_poly in dst that is
    # compatible with every factorisation through an intermediate field
    sub_gen = primitive_element(dst) ** ((dst.size - 1) // (src.size - 1))
    roots = []
    z = dst.one()
    for _ in range(src.size - 1):
        if _poly_eval(src.defining_poly, z).is_zero():
            roots.append(z)
        z = z * sub_gen
    forced = set()
    for mid in _intermediates(src, dst):
        forced.add(embed(embed(src.gen(), mid), dst))
    candidates = sorted(r for r in roots if not forced or r in forced)
    if len(forced) > 1 or not candidates:
        raise FieldError(f"no coherent embedding {src!r} -> {dst!r} (raise the tower cap with care)")
    r = candidates[0]
    rows, power = [], dst.one()
    for _ in range(src.d):
        rows.append(power.coeffs)
        power = power * r
    return tuple(rows)


def _embedding(src: FieldDesc, dst: FieldDesc) -> tuple[tuple[int, ...], ...]:
    key = (src, dst)
    rows = _embed_cache.get(key)
    if rows is None:
        rows = _compute_embedding(src, dst)
        with _embed_lock:
            rows = _embed_cache.setdefault(key, rows)
    return rows


def embed(a: FieldElem, target: FieldDesc) -> FieldElem:
    src = a.field
    if src.p != target.p:
        raise FieldError(f"characteristic mismatch: {src!r} -> {target!r}")
    if target.d % src.d:
        raise FieldError(f"{src!r} does not embed in {target!r}")
    if src == target:
        return a
    return _apply_linear(_embedding(src, target), a, target)


@lru_cache(maxsize=None)
def _restriction(src: FieldDesc, dst: FieldDesc):
    """Pivot columns and inverse matrix to read off src-coordinates from dst."""
    p = src.p
    rows = [list(r) for r in _embedding(src, dst)]  # src.d x dst.d
    # choose src.d columns of the dst.d coordinates giving an invertible minor
    a = src.d
    cols = []
    work = [r[:] for r in rows]
    for c in range(dst.d):
        trial = cols + [c]
        if _rank_mod_p([[work[i][j] for j in trial] for i in range(a)], p) == len(trial):
            cols = trial
        if len(cols) == a:
            break
    minor = [[rows[i][j] for j in cols] for i in range(a)]
    return tuple(cols), _inverse_mod_p(minor, p)


def _rank_mod_p(m: list[list[int]], p: int) -> int:
    m = [r[:] for r in m]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c] % p), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][c], p - 2, p)
        m[rank] = [x * inv % p for x in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][c] % p:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[rank])]
        rank += 1
    return rank


def _inverse_mod_p(m: list[list[int]], p: int) -> tuple[tuple[int, ...], ...]:
    n = len(m)
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(m)]
    for c in range(n):
        piv = next(i for i in range(c, n) if aug[i][c] % p)
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = pow(aug[c][c], p - 2, p)
        aug[c] = [x * inv % p for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] % p:
                f = aug[i][c]
                aug[i] = [(x - f * y) % p for x, y in zip(aug[i], aug[c])]
    return tuple(tuple(r[n:]) for r in aug)


def restrict(a: FieldElem, sub: FieldDesc) -> FieldElem:
    """Inverse of `embed`: the element of `sub` whose image is `a`.

    Raises FieldError if `a` does not lie in the embedded copy of `sub`.
    """
    if a.field == sub:
        return a
    if not sub.divides(a.field):
        raise FieldError(f"{sub!r} is not a subfield of {a.field!r}")
    cols, inv = _restriction(sub, a.field)
    p = sub.p
    picked = [a.coeffs[j] for j in cols]
    # picked = x * minor  =>  x = picked * minor^{-1}
    x = [sum(picked[i] * inv[i][k] for i in range(len(picked))) % p for k in range(sub.d)]
    out = FieldElem(sub, tuple(x))
    if embed(out, a.field) != a:
        raise FieldError(f"{a!r} does not lie in {sub!r}")
    return out


def conjugates(a: FieldElem, down_to: FieldDesc) -> list[FieldElem]:
    if not down_to.divides(a.field):
        raise FieldError(f"{down_to!r} is not a subfield of {a.field!r}")
    m = a.field.d // down_to.d
    out = [a]
    for _ in range(m - 1):
        out.append(frobenius_p(out[-1], down_to.d))
    return out


def trace(a: FieldElem, down_to: FieldDesc) -> FieldElem:
    total = a.field.zero()
    for c in conjugates(a, down_to):
        total = total + c
    return restrict(total, down_to)


def norm(a: FieldElem, down_to: FieldDesc) -> FieldElem:
    total = a.field.one()
    for c in conjugates(a, down_to):
        total = total * c
    return restrict(total, down_to)
