"""Relative Chow groups of zero-cycles CH_0(X, D) for X = P^1 - supp(D).

The idele description presents CH_0(X, D) as the cokernel of

    F(t)^x  ->  (+)_{x in X} Z  (+)  (+)_{x in D} F_x^x / U_x^{m_x}

sending f to its divisor on X and its local classes at the boundary, where
F_x^x / U_x^m = Z (+) (O_x / m_x^m)^x.  Truncation keeps closed points of
degree <= N_pts and the relation rows of monic irreducibles of degree <= N_fun
plus one generator of F^x.

The closed form |CH_0(X, D)^0| = |J_{P^1, D}(F_q)| serves as the oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import poly as P
from .divisor import INF, ClosedPoint, Divisor, Modulus, local_data
from .ffield import FieldDesc, FieldElem, extension, frobenius_p, primitive_element, restrict
from .groups import (AbelianStructure, GroupValue, ValueFunctor, abelian_structure, genjac,
                     genjac_closed_order, value, value_group)
from .mackey import MackeyResult, compute_order
from .zlinalg import CokernelStructure, IntMatrix, cokernel_structure

MAX_RELATION_ROWS = 3000
MAX_LOCAL_ORDER = 10**5


class ChowError(ValueError):
    pass


# --- local unit groups ---------------------------------------------------------------

@dataclass
class LocalUnitQuotient:
    """F_x^x / U_x^m = Z (uniformizer) (+) (O_x / m^m)^x."""

    point: ClosedPoint
    mult: int
    units: AbelianStructure
    modulus: tuple  # pi^m in the local parameter

    @property
    def structure(self) -> AbelianStructure:
        gens = [("uniformizer", self.point.local_parameter())] + [("unit", g) for g in self.units.generators]
        return AbelianStructure([0] + list(self.units.invariant_factors), gens,
                                dlog_fn=self.dlog)

    def unit_coords(self, unit: tuple) -> tuple[int, ...]:
        return self.units.table[_pad(P.mod(unit, self.modulus), P.degree(self.modulus), self.point.field)]

    def dlog(self, f: tuple[tuple, tuple]) -> tuple[int, ...]:
        """Coordinates of a rational function num/den."""
        v, unit = local_data(f[0], f[1], self.point, self.mult)
        return (v,) + self.unit_coords(unit)


def _pad(r: tuple, n: int, F: FieldDesc) -> tuple:
    return tuple(r) + (F.zero(),) * (n - len(r))


def local_unit_quotient(pt: ClosedPoint, m: int) -> LocalUnitQuotient:
    if m < 1:
        raise ChowError("multiplicity must be at least 1")
    F = pt.field
    mod = pt.local_modulus(m)
    n = P.degree(mod)
    if F.size ** n > MAX_LOCAL_ORDER:
        raise ChowError(f"(O/m^{m})^x at {pt} is too large to enumerate")
    one = P.const(F, 1)
    elems = []
    for coeffs in itertools.product(list(F.elements()), repeat=n):
        r = P.trim(coeffs)
        if r and P.gcd(r, mod) == one:
            elems.append(tuple(coeffs))

    def mul(a, b):
        return _pad(P.mod(P.mul(P.trim(a), P.trim(b)), mod), n, F)

    st = abelian_structure(elems, mul, _pad(one, n, F))
    return LocalUnitQuotient(pt, m, st, mod)


# --- the idele presentation -------------------------------------------------------------

@dataclass
class IdelePresentation:
    modulus: Modulus
    n_pts: int
    n_fun: int
    columns: list[tuple]          # ("cycle", point) | ("val", point) | ("unit", point, i)
    degrees: list[int]
    relations: IntMatrix
    locals: dict[ClosedPoint, LocalUnitQuotient] = field(default_factory=dict)


def _closed_points(F: FieldDesc, max_deg: int) -> list[ClosedPoint]:
    pts = [ClosedPoint(F, g) for k in range(1, max_deg + 1) for g in P.monic_irreducibles(F, k)]
    return pts + [ClosedPoint(F, None)]


def default_truncation(D: Divisor) -> int:
    """4 deg D + 4, lowered until the relation count fits the row cap."""
    q = D.field.size
    n = 4 * D.degree + 4
    while n > 1 and sum(P.count_irreducibles(q, k) for k in range(1, n + 1)) > MAX_RELATION_ROWS:
        n -= 1
    return n


def build_idele_presentation(mod: Modulus, n_pts: int, n_fun: int) -> IdelePresentation:
    if n_fun > n_pts:
        raise ChowError("N_fun may not exceed N_pts (relation rows would leave the generator set)")
    F = mod.field
    D = mod.divisor
    if sum(P.count_irreducibles(F.size, k) for k in range(1, n_pts + 1)) > MAX_RELATION_ROWS:
        raise ChowError(f"N_pts = {n_pts} exceeds the cap of {MAX_RELATION_ROWS} closed points")
    locs = {pt: local_unit_quotient(pt, m) for pt, m in D.terms}
    columns: list[tuple] = []
    degrees: list[int] = []
    for pt in _closed_points(F, n_pts):
        if mod.in_curve(pt):
            columns.append(("cycle", pt))
            degrees.append(pt.degree)
    for pt, _ in D.terms:
        columns.append(("val", pt))
        degrees.append(pt.degree)
        for i in range(len(locs[pt].units.invariant_factors)):
            columns.append(("unit", pt, i))
            degrees.append(0)
    index = {c: i for i, c in enumerate(columns)}
    rows: list[dict[int, int]] = []

    def add_function(num: tuple, den: tuple, div_terms: list[tuple[ClosedPoint, int]]):
        row: dict[int, int] = {}
        for pt, v in div_terms:
            if mod.in_curve(pt):
                row[index[("cycle", pt)]] = row.get(index[("cycle", pt)], 0) + v
        for pt, lq in locs.items():
            coords = lq.dlog((num, den))
            if coords[0]:
                row[index[("val", pt)]] = coords[0]
            for i, (c, d) in enumerate(zip(coords[1:], lq.units.invariant_factors)):
                if c % d:
                    row[index[("unit", pt, i)]] = c
        row = {k: v for k, v in row.items() if v}
        if sum(v * degrees[k] for k, v in row.items()) != 0:
            raise ChowError("principal idele of nonzero degree")  # invariant check
        if row:
            rows.append(row)

    one = P.const(F, 1)
    for k in range(1, n_fun + 1):
        for g in P.monic_irreducibles(F, k):
            add_function(g, one, [(ClosedPoint(F, g), 1), (ClosedPoint(F, None), -k)])
    if F.size > 2:
        c = P.const(F, primitive_element(F))
        add_function(c, one, [])
    for pt, lq in locs.items():
        for i, d in enumerate(lq.units.invariant_factors):
            rows.append({index[("unit", pt, i)]: d})
    uniq = sorted({tuple(sorted(r.items())) for r in rows})
    mat = IntMatrix.from_sparse_rows([dict(r) for r in uniq], len(columns))
    return IdelePresentation(mod, n_pts, n_fun, columns, degrees, mat, locs)


@dataclass
class ChowResult:
    modulus: Modulus
    n_pts: int
    n_fun: int
    total: CokernelStructure
    degree_zero: CokernelStructure
    generator_count: int
    relation_count: int

    @property
    def order(self) -> int | None:
        return self.degree_zero.order


def relative_chow(mod: Modulus, n_pts: int | None = None, n_fun: int | None = None) -> ChowResult:
    """CH_0(X, D) and its degree-zero part from the truncated idele presentation.

    Since a degree-one generator c0 always exists on P^1, CH_0 = Z (+) CH_0^0,
    and CH_0^0 is the cokernel with the column of c0 deleted (the other
    generators become e_c - deg(c) e_{c0}).
    """
    n_default = default_truncation(mod.divisor)
    n_pts = n_default if n_pts is None else n_pts
    n_fun = n_pts if n_fun is None else n_fun
    pres = build_idele_presentation(mod, n_pts, n_fun)
    ncols = len(pres.columns)
    total = cokernel_structure(pres.relations, ncols)
    c0 = next(i for i, d in enumerate(pres.degrees) if d == 1)
    keep = [i for i in range(ncols) if i != c0]
    remap = {c: j for j, c in enumerate(keep)}
    rows = [{remap[c]: v for c, v in r.items() if c != c0} for r in pres.relations.sparse_rows()]
    zero_part = cokernel_structure(IntMatrix.from_sparse_rows(rows, ncols - 1), ncols - 1)
    return ChowResult(mod, n_pts, n_fun, total, zero_part, ncols, pres.relations.rows)


def chow_scan(mod: Modulus, bounds) -> list[ChowResult]:
    return [relative_chow(mod, n, n) for n in bounds]


def genjac_order(q: int, D: Divisor) -> int:
    """prod q^{deg p (e-1)} (q^{deg p} - 1) / (q - 1).

    The formula depends only on the degrees of the support points, so the
    point at infinity needs no coordinate change.
    """
    if D.is_empty():
        raise ChowError("empty modulus")
    return genjac_closed_order(D, q)


# --- Abel-Jacobi and push-forward -------------------------------------------------------

def cycle_degree(z: Divisor) -> int:
    return sum(p.degree * m for p, m in z.terms)


def _function_of(z: Divisor) -> tuple[tuple, tuple]:
    """f with div(f) = z on P^1, for a degree-zero cycle z."""
    F = z.field
    num = den = P.const(F, 1)
    for pt, m in z.terms:
        if pt.is_infinity:
            continue
        if m > 0:
            num = P.mul(num, P.power(pt.poly, m, F))
        else:
            den = P.mul(den, P.power(pt.poly, -m, F))
    return num, den


def abel_jacobi(z: Divisor, D: Divisor) -> GroupValue:
    """Class of a degree-zero cycle on X_E in J_{P^1, D}(E), E = z.field.

    z = div(f) on P^1 and the class is (f mod U_x^{m_x})_x, modulo constants.
    """
    E = z.field
    if cycle_degree(z):
        raise ChowError("Abel-Jacobi needs a degree-zero cycle")
    fn = genjac(D)
    num, den = _function_of(z)
    comps = []
    for pt, m in D.terms:
        lpt = ClosedPoint(E, None if pt.is_infinity else P.change_field(pt.poly, E))
        mod = lpt.local_modulus(m)
        if pt.is_infinity:
            un, ud = P.reverse(num), P.reverse(den)
        else:
            un, ud = num, den
        if P.gcd(P.mul(un, ud), mod) != P.const(E, 1):
            raise ChowError(f"cycle meets the modulus at {pt}")
        r = P.mod(P.mul(un, P.inverse_mod(ud, mod, E)), mod)
        comps.append(_pad(r, P.degree(mod), E))
    return value(fn, E, tuple(comps))


def _min_poly_over(root: FieldElem, F: FieldDesc) -> tuple:
    conj, x = [], root
    while True:
        conj.append(x)
        x = frobenius_p(x, F.d)
        if x == root:
            break
    E = root.field
    out = P.const(E, 1)
    for c in conj:
        out = P.mul(out, (-c, E.one()))
    return tuple(restrict(c, F) for c in out)


def _root_of(poly: tuple) -> FieldElem:
    F = poly[0].field
    E = extension(F, P.degree(poly))
    for z in E.elements():
        if P.evaluate(poly, z).is_zero():
            return z
    raise ChowError("no root found")


def cycle_pushforward(z: Divisor, target: FieldDesc) -> Divisor:
    """Push a cycle on P^1 over E = z.field down to P^1 over target (E over target)."""
    E = z.field
    if not target.divides(E):
        raise ChowError(f"{E!r} is not an extension of {target!r}")
    k = E.d // target.d
    terms = []
    for pt, m in z.terms:
        if pt.is_infinity:
            terms.append((ClosedPoint(target, None), m * k))
            continue
        mp = _min_poly_over(_root_of(pt.poly), target)
        down = ClosedPoint(target, mp)
        terms.append((down, m * pt.degree * k // down.degree))
    return Divisor.from_terms(target, terms, signed=True)


# --- product bound --------------------------------------------------------------------

@dataclass
class ProductBound:
    bound: int | None
    factor_orders: tuple[int, int]
    closed_form_orders: tuple[int, int]
    mackey: MackeyResult
    certificate: list[str]


def has_rational_point(mod: Modulus) -> bool:
    F = mod.field
    return any(mod.in_curve(pt) for pt in _closed_points(F, 1) if pt.degree == 1)


def product_bound(mod1: Modulus, mod2: Modulus, d_max: int = 2) -> ProductBound:
    """|J_1(F)| |J_2(F)| |(J_1 (x)^M J_2)(F)| bounds |CH_0(X_1 x X_2, D)^0|."""
    F = mod1.field
    if mod2.field != F:
        raise ChowError("both curves must live over the same field")
    for i, mod in enumerate((mod1, mod2), 1):
        if not has_rational_point(mod):
            raise ChowError(f"X_{i} has no rational point")
    j1, j2 = genjac(mod1.divisor), genjac(mod2.divisor)
    o1, o2 = value_group(j1, F).order, value_group(j2, F).order
    c1, c2 = genjac_order(F.size, mod1.divisor), genjac_order(F.size, mod2.divisor)
    mk = compute_order([j1, j2], F, d_max)
    bound = None if mk.order is None else o1 * o2 * mk.order
    cert = [
        f"J(X_1, {mod1}) (+) J(X_2, {mod2}) (+) (J_1 (x)^M J_2)(F) surjects onto CH_0(X_1 x X_2, D)^0",
        f"|J_1(F)| = {o1} (closed form {c1})",
        f"|J_2(F)| = {o2} (closed form {c2})",
        f"|(J_1 (x)^M J_2)(F)| = {mk.order} at degree bound {d_max}",
        f"bound = {bound}",
    ]
    return ProductBound(bound, (o1, o2), (c1, c2), mk, cert)
