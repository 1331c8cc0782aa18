"""Truncated Mackey products (M_1 (x)^M ... (x)^M M_n)(x) as finitely presented groups.

Generators are the basis tensors of the layers L(y) = M_1(y) (x) ... (x) M_n(y)
for the extensions y of x with [y:x] <= d_max (one point per degree).  The
relations are the layer torsion relations, and the projection formula

    {j^*a_1, ..., a'_i, ..., j^*a_n}_{y'/x} = {a_1, ..., j_*a'_i, ..., a_n}_{y/x}

for the canonical inclusions y -> y' and for the Frobenius automorphism of
every y'.  Relations for other morphisms are composites of these.

Truncation is an approximation: the truncated group neither injects into nor
surjects onto the full colimit a priori, so every result records its degree
bound and whether consecutive bounds agreed.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Sequence

from .ffield import FieldDesc, extension
from .groups import (AbelianStructure, GroupError, GroupValue, Kind, ValueFunctor,
                     enumerate_elements, frobenius_pullback, frobenius_pushforward,
                     pullback, pushforward, value_group, zero)
from .zlinalg import CokernelStructure, IntMatrix, RowLattice, cokernel_structure

MAX_GENERATORS = 20000


class MackeyError(ValueError):
    pass


@dataclass(frozen=True)
class FinitePoint:
    """y = Spec(ext) viewed over x = Spec(base)."""

    base: FieldDesc
    ext: FieldDesc

    def __post_init__(self):
        if not self.base.divides(self.ext):
            raise MackeyError(f"{self.ext!r} is not an extension of {self.base!r}")

    @property
    def degree(self) -> int:
        return self.ext.d // self.base.d

    def __str__(self) -> str:
        return f"{self.ext}/{self.base}"


@dataclass(frozen=True)
class Symbol:
    functors: tuple[ValueFunctor, ...]
    point: FinitePoint
    entries: tuple[GroupValue, ...]

    def __post_init__(self):
        if len(self.functors) != len(self.entries):
            raise MackeyError("symbol length does not match the functor list")
        for fn, a in zip(self.functors, self.entries):
            if a.functor != fn or a.point != self.point.ext:
                raise MackeyError(f"entry {a} does not live in {fn}({self.point.ext!r})")

    def is_trivially_zero(self) -> bool:
        return any(a.is_zero() for a in self.entries)

    def __str__(self) -> str:
        from .groups import payload_json
        body = ", ".join(str(payload_json(a)) for a in self.entries)
        return "{" + body + "}_" + str(self.point)


def make_symbol(functors: Sequence[ValueFunctor], point: FinitePoint, entries: Sequence[GroupValue]) -> Symbol:
    return Symbol(tuple(functors), point, tuple(entries))


def pushforward_symbol(s: Symbol, new_base: FieldDesc) -> Symbol:
    """(M3): j_*{a}_{y/x'} = {a}_{y/x} for x' over x."""
    if not new_base.divides(s.point.base):
        raise MackeyError(f"{s.point.base!r} is not a finite point over {new_base!r}")
    return Symbol(s.functors, FinitePoint(new_base, s.point.ext), s.entries)


# --- layers ----------------------------------------------------------------------

class Layer:
    """L(y) = M_1(y) (x) ... (x) M_n(y) from the invariant factors of the M_i(y).

    Z/a (x) Z/b = Z/gcd(a, b) with e (x) f -> 1, extended multilinearly; the
    basis tensors are index tuples into the factor lists, and basis tensors of
    order 1 are dropped.  A factor 0 is a free Z.
    """

    def __init__(self, functors: Sequence[ValueFunctor], point: FieldDesc):
        self.functors = tuple(functors)
        self.point = point
        self.structures: list[AbelianStructure] = [value_group(fn, point) for fn in functors]
        self.basis: list[tuple[int, ...]] = []
        self.orders: list[int] = []
        ranges = [range(len(st.invariant_factors)) for st in self.structures]
        for idx in itertools.product(*ranges):
            g = 0
            for st, j in zip(self.structures, idx):
                g = gcd(g, st.invariant_factors[j])
            if g != 1:
                self.basis.append(idx)
                self.orders.append(g)
        self._index = {b: i for i, b in enumerate(self.basis)}

    def __len__(self) -> int:
        return len(self.basis)

    def evaluate(self, entries: Sequence[GroupValue]) -> dict[int, int]:
        """Coordinates of a_1 (x) ... (x) a_n in the layer basis (reduced mod orders)."""
        coords = [st.dlog(a) for st, a in zip(self.structures, entries)]
        if any(not any(c) for c in coords):
            return {}
        out: dict[int, int] = {}
        nz = [[(j, c) for j, c in enumerate(cs) if c] for cs in coords]
        for combo in itertools.product(*nz):
            idx = tuple(j for j, _ in combo)
            pos = self._index.get(idx)
            if pos is None:
                continue
            v = 1
            for _, c in combo:
                v *= c
            g = self.orders[pos]
            if g:
                v %= g
            if v:
                out[pos] = v
        return out

    def structure(self) -> CokernelStructure:
        rows = [{i: g} for i, g in enumerate(self.orders) if g]
        return cokernel_structure(IntMatrix.from_sparse_rows(rows, len(self)), len(self))


def layer_group(functors: Sequence[ValueFunctor], y: FinitePoint | FieldDesc) -> Layer:
    point = y.ext if isinstance(y, FinitePoint) else y
    return Layer(functors, point)


# --- presentations -------------------------------------------------------------------

@dataclass
class RelationInstance:
    """One projection-formula instance: lhs symbol equals rhs symbol."""

    rule: str
    lhs: Symbol
    rhs: Symbol


@dataclass
class MackeyPresentation:
    functors: tuple[ValueFunctor, ...]
    base: FieldDesc
    degree_bound: int
    layers: dict[int, Layer]
    offsets: dict[int, int]
    generator_count: int
    relations: IntMatrix
    structure: CokernelStructure
    instances: list[RelationInstance] = field(default_factory=list)
    naive: bool = False
    _lattice: RowLattice | None = None

    def evaluate(self, s: Symbol) -> list[int]:
        return evaluate_symbol(s, self)

    def lattice(self) -> RowLattice:
        if self._lattice is None:
            self._lattice = RowLattice(self.relations)
        return self._lattice

    @property
    def relation_count(self) -> int:
        return self.relations.rows


def _points(base: FieldDesc, d_max: int) -> dict[int, FieldDesc]:
    out = {}
    for k in range(1, d_max + 1):
        out[k] = extension(base, k)
    return out


def _check_functors(functors: Sequence[ValueFunctor], x: FieldDesc) -> None:
    if not functors:
        raise MackeyError("at least one functor is required")
    for fn in functors:
        if not fn.base.divides(x):
            raise MackeyError(f"{fn} is defined over {fn.base!r}, not below {x!r}")


def _finalize_rows(rows: Iterable[dict[int, int]], ncols: int) -> IntMatrix:
    uniq = {tuple(sorted(r.items())) for r in rows if r}
    ordered = sorted(uniq)
    return IntMatrix.from_sparse_rows([dict(r) for r in ordered], ncols)


def build_presentation(functors: Sequence[ValueFunctor], x: FieldDesc, d_max: int,
                       keep_instances: bool = False) -> MackeyPresentation:
    functors = tuple(functors)
    _check_functors(functors, x)
    if d_max < 1:
        raise MackeyError("d_max must be at least 1")
    pts = _points(x, d_max)
    layers = {k: Layer(functors, E) for k, E in pts.items()}
    offsets, total = {}, 0
    for k in sorted(layers):
        offsets[k] = total
        total += len(layers[k])
    if total > MAX_GENERATORS:
        raise MackeyError(f"{total} generators exceed the cap {MAX_GENERATORS}")

    def coords(k: int, entries) -> dict[int, int]:
        off = offsets[k]
        return {off + i: v for i, v in layers[k].evaluate(entries).items()}

    rows: list[dict[int, int]] = []
    instances: list[RelationInstance] = []
    for k, layer in layers.items():
        for i, g in enumerate(layer.orders):
            if g:
                rows.append({offsets[k] + i: g})

    n = len(functors)

    def emit(rule, k_lhs, lhs, k_rhs, rhs):
        row = coords(k_lhs, lhs)
        for c, v in coords(k_rhs, rhs).items():
            row[c] = row.get(c, 0) - v
            if not row[c]:
                del row[c]
        if row:
            rows.append(row)
        if keep_instances:
            instances.append(RelationInstance(
                rule, Symbol(functors, FinitePoint(x, pts[k_lhs]), tuple(lhs)),
                Symbol(functors, FinitePoint(x, pts[k_rhs]), tuple(rhs))))

    for l in sorted(pts):
        big = pts[l]
        for k in sorted(pts):
            if k >= l or l % k:
                continue
            small = pts[k]
            for i0 in range(n):
                primes = layers[l].structures[i0].generators
                others = [layers[k].structures[i].generators for i in range(n) if i != i0]
                for a_p in primes:
                    for rest in itertools.product(*others):
                        lhs = [pullback(functors[i], big, r) for i, r in zip(_skip(n, i0), rest)]
                        lhs.insert(i0, a_p)
                        rhs = list(rest)
                        rhs.insert(i0, pushforward(functors[i0], small, a_p))
                        emit("projection", l, lhs, k, rhs)
        if l > 1:
            for i0 in range(n):
                primes = layers[l].structures[i0].generators
                others = [layers[l].structures[i].generators for i in range(n) if i != i0]
                for a_p in primes:
                    for rest in itertools.product(*others):
                        lhs = [frobenius_pullback(functors[i], x, r) for i, r in zip(_skip(n, i0), rest)]
                        lhs.insert(i0, a_p)
                        rhs = list(rest)
                        rhs.insert(i0, frobenius_pushforward(functors[i0], x, a_p))
                        emit("frobenius", l, lhs, l, rhs)

    mat = _finalize_rows(rows, total)
    return MackeyPresentation(functors, x, d_max, layers, offsets, total, mat,
                              cokernel_structure(mat, total), instances)


def _skip(n: int, i0: int) -> list[int]:
    return [i for i in range(n) if i != i0]


def evaluate_symbol(s: Symbol, pres: MackeyPresentation) -> list[int]:
    if pres.naive:
        raise MackeyError("naive presentations evaluate elementary tensors directly")
    if s.point.base != pres.base:
        raise MackeyError(f"symbol over {s.point.base!r}, presentation over {pres.base!r}")
    if s.functors != pres.functors:
        raise MackeyError("symbol functors differ from the presentation's")
    k = s.point.degree
    if k > pres.degree_bound:
        raise MackeyError(f"symbol degree {k} exceeds the bound {pres.degree_bound}")
    vec = [0] * pres.generator_count
    off = pres.offsets[k]
    for i, v in pres.layers[k].evaluate(s.entries).items():
        vec[off + i] = v
    return vec


def combination_vector(terms: Iterable[tuple[int, Symbol]], pres: MackeyPresentation) -> list[int]:
    vec = [0] * pres.generator_count
    for c, s in terms:
        for i, v in enumerate(evaluate_symbol(s, pres)):
            if v:
                vec[i] += c * v
    return vec


# --- naive oracle ------------------------------------------------------------------

def build_naive_presentation(functors: Sequence[ValueFunctor], x: FieldDesc, d_max: int) -> MackeyPresentation:
    """One generator per elementary tensor of group elements.

    Multilinearity is imposed explicitly ([.., a+g, ..] = [.., a, ..] + [.., g, ..]
    for g in a generating set), and the projection formula for every element
    tuple.  No discrete logarithms or invariant factors are used.
    """
    functors = tuple(functors)
    _check_functors(functors, x)
    if any(not fn.is_finite for fn in functors):
        raise MackeyError("the naive oracle needs finite value groups")
    pts = _points(x, d_max)
    n = len(functors)
    elems = {(i, k): enumerate_elements(functors[i], E) for i in range(n) for k, E in pts.items()}
    total = 0
    index: dict[tuple[int, tuple], int] = {}
    for k in sorted(pts):
        for tup in itertools.product(*[elems[(i, k)] for i in range(n)]):
            index[(k, tup)] = total
            total += 1
    if total > MAX_GENERATORS * 5:
        raise MackeyError(f"{total} elementary tensors exceed the naive cap")

    from .groups import _law
    laws = [_law(fn) for fn in functors]

    def col(k, tup):
        return index[(k, tuple(tup))]

    rows: list[dict[int, int]] = []

    def emit(pos, neg):
        row: dict[int, int] = {}
        for c in pos:
            row[c] = row.get(c, 0) + 1
        for c in neg:
            row[c] = row.get(c, 0) - 1
        row = {c: v for c, v in row.items() if v}
        if row:
            rows.append(row)

    # multilinearity, plus [.., 0, ..] = 0 (needed when a factor is the trivial group)
    for k, E in pts.items():
        gens = [[g.payload for g in value_group(functors[i], E).generators] for i in range(n)]
        zeros = [laws[i].zero(functors[i], E) for i in range(n)]
        for tup in itertools.product(*[elems[(i, k)] for i in range(n)]):
            if any(t == z for t, z in zip(tup, zeros)):
                emit([col(k, tup)], [])
            for i in range(n):
                for g in gens[i]:
                    t1 = list(tup)
                    t1[i] = laws[i].add(functors[i], E, tup[i], g)
                    t2 = list(tup)
                    t2[i] = g
                    emit([col(k, t1)], [col(k, tup), col(k, t2)])

    def pay(fn, E, v):
        return GroupValue(fn, E, v)

    for l, big in pts.items():
        for k, small in pts.items():
            if k >= l or l % k:
                continue
            up = [{a: pullback(functors[i], big, pay(functors[i], small, a)).payload for a in elems[(i, k)]}
                  for i in range(n)]
            down = [{a: pushforward(functors[i], small, pay(functors[i], big, a)).payload for a in elems[(i, l)]}
                    for i in range(n)]
            for i0 in range(n):
                for a_p in elems[(i0, l)]:
                    for rest in itertools.product(*[elems[(i, k)] for i in _skip(n, i0)]):
                        lhs = [up[i][r] for i, r in zip(_skip(n, i0), rest)]
                        lhs.insert(i0, a_p)
                        rhs = list(rest)
                        rhs.insert(i0, down[i0][a_p])
                        emit([col(l, lhs)], [col(k, rhs)])
        if l > 1:
            fup = [{a: frobenius_pullback(functors[i], x, pay(functors[i], big, a)).payload for a in elems[(i, l)]}
                   for i in range(n)]
            fdown = [{a: frobenius_pushforward(functors[i], x, pay(functors[i], big, a)).payload for a in elems[(i, l)]}
                     for i in range(n)]
            for i0 in range(n):
                for a_p in elems[(i0, l)]:
                    for rest in itertools.product(*[elems[(i, l)] for i in _skip(n, i0)]):
                        lhs = [fup[i][r] for i, r in zip(_skip(n, i0), rest)]
                        lhs.insert(i0, a_p)
                        rhs = list(rest)
                        rhs.insert(i0, fdown[i0][a_p])
                        emit([col(l, lhs)], [col(l, rhs)])

    mat = _finalize_rows(rows, total)
    return MackeyPresentation(functors, x, d_max, {}, {}, total, mat,
                              cokernel_structure(mat, total), naive=True)


# --- orders and scans -----------------------------------------------------------------

@dataclass
class MackeyResult:
    functors: tuple[ValueFunctor, ...]
    base: FieldDesc
    degree_bound: int
    generator_count: int
    relation_count: int
    structure: CokernelStructure
    wall_time_ms: float = 0.0

    @property
    def order(self) -> int | None:
        return self.structure.order

    @property
    def invariant_factors(self) -> list[int]:
        return list(self.structure.invariant_factors)

    @property
    def free_rank(self) -> int:
        return self.structure.free_rank


def compute_order(functors: Sequence[ValueFunctor], x: FieldDesc, d_max: int,
                  naive: bool = False) -> MackeyResult:
    t0 = time.perf_counter()
    build = build_naive_presentation if naive else build_presentation
    pres = build(functors, x, d_max)
    ms = (time.perf_counter() - t0) * 1000
    return MackeyResult(tuple(functors), x, d_max, pres.generator_count, pres.relation_count,
                        pres.structure, ms)


@dataclass
class ScanResult:
    steps: list[MackeyResult]

    @property
    def stabilized(self) -> bool:
        if len(self.steps) < 2:
            return False
        a, b = self.steps[-2].structure, self.steps[-1].structure
        return (a.invariant_factors, a.free_rank) == (b.invariant_factors, b.free_rank)

    @property
    def final(self) -> MackeyResult:
        return self.steps[-1]


def stabilization_scan(functors: Sequence[ValueFunctor], x: FieldDesc, d_range: Iterable[int]) -> ScanResult:
    return ScanResult([compute_order(functors, x, d) for d in d_range])


def result_json(res: MackeyResult, stabilized: bool | None = None, timing: bool = False) -> dict:
    out = {
        "functors": [fn.label for fn in res.functors],
        "base_field": str(res.base),
        "degree_bound": res.degree_bound,
        "generator_count": res.generator_count,
        "relation_count": res.relation_count,
        "invariant_factors": res.invariant_factors,
        "free_rank": res.free_rank,
        "order": res.order,
        "stabilized": stabilized,
    }
    if timing:
        out["wall_time_ms"] = round(res.wall_time_ms, 3)
    return out


def low_layer_image_order(pres: MackeyPresentation, d_low: int) -> int | None:
    """Order of the subgroup generated by the layers of degree <= d_low.

    Unlike the truncated group itself, this image can only shrink as the
    degree bound of `pres` grows, and it converges to the image in the full
    colimit.  Returns None when the truncated group is infinite.
    """
    total = pres.structure.order
    if total is None:
        return None
    cols = [pres.offsets[k] + i for k in pres.layers if k <= d_low for i in range(len(pres.layers[k]))]
    rows = list(pres.relations.sparse_rows()) + [{c: 1} for c in cols]
    quotient = cokernel_structure(IntMatrix.from_sparse_rows(rows, pres.generator_count), pres.generator_count)
    return total // quotient.order


def reduce_symbol(s: Symbol, strategy, **kwargs):
    """Certified reduction of a symbol; see `mackeyprod.certify`."""
    from .certify import reduce_symbol as _reduce
    return _reduce(s, strategy, **kwargs)


# --- closed form for powers of GM ------------------------------------------------------

@dataclass
class TorusPowerResult:
    q: int
    n: int
    degree_bound: int
    structure: CokernelStructure
    image_orders: dict[int, int]  # d_low -> order of the image of layers of degree <= d_low


def gm_power_presentation(q: int, n: int, d_max: int) -> tuple[IntMatrix, int]:
    """Relations of the truncated n-fold product of GM over F_q, without field arithmetic.

    With norm-compatible generators g_k of F_{q^k}^x, the layer at degree k is
    Z/(q^k - 1) spanned by {g_k, ..., g_k}; inclusions k | l give
    s^{n-1} e_l = e_k with s = (q^l - 1)/(q^k - 1), and Frobenius gives
    (q^{n-1} - q^{l-1}) e_l = 0.
    """
    rows: list[dict[int, int]] = []
    for l in range(1, d_max + 1):
        ql = q**l - 1
        rows.append({l - 1: ql})
        if l > 1:
            c = (q ** (n - 1) - q ** (l - 1)) % ql
            if c:
                rows.append({l - 1: c})
        for k in range(1, l):
            if l % k == 0:
                s = pow(ql // (q**k - 1), n - 1, ql)
                row = {l - 1: s}
                row[k - 1] = row.get(k - 1, 0) - 1
                rows.append(row)
    return _finalize_rows(rows, d_max), d_max


def gm_power_scan(q: int, n: int, d_max: int, d_lows: Sequence[int] = (1, 2, 3)) -> TorusPowerResult:
    mat, ncols = gm_power_presentation(q, n, d_max)
    st = cokernel_structure(mat, ncols)
    images = {}
    for d_low in d_lows:
        if d_low > d_max:
            continue
        extra = list(mat.sparse_rows()) + [{c: 1} for c in range(d_low)]
        quo = cokernel_structure(IntMatrix.from_sparse_rows(extra, ncols), ncols)
        images[d_low] = st.order // quo.order
    return TorusPowerResult(q, n, d_max, st, images)


def gm_power_vanishing_bound(q: int, n: int, d_low: int, limit: int = 120) -> int | None:
    """Least D <= limit at which the layers of degree <= d_low have trivial image."""
    for D in range(d_low, limit + 1):
        if gm_power_scan(q, n, D, (d_low,)).image_orders[d_low] == 1:
            return D
    return None
