import itertools

import pytest
from hypothesis import given, strategies as st

from mackeyprod.divisor import parse_divisor
from mackeyprod.ffield import extension, make_field
from mackeyprod.groups import CONST, GA, GM, GroupValue, elliptic, enumerate_elements, genjac, value_group
from mackeyprod.mackey import (FinitePoint, MackeyError, Symbol, build_naive_presentation,
                               build_presentation, combination_vector, compute_order,
                               gm_power_scan, gm_power_vanishing_bound, layer_group,
                               low_layer_image_order, pushforward_symbol, stabilization_scan)

F2, F3, F5 = make_field(2, 1), make_field(3, 1), make_field(5, 1)


def fn_of(name, F):
    if name == "J":
        return genjac(parse_divisor("2*(0)", F))
    return {"GA": GA, "GM": GM, "Z": CONST}[name](F)


def shape(res):
    return (res.invariant_factors, res.free_rank)


def test_layer_examples():
    F4 = extension(F2, 2)
    assert layer_group([GA(F2), GA(F2)], FinitePoint(F2, F2)).structure().order == 2
    assert layer_group([GM(F2), GM(F2)], FinitePoint(F2, F4)).structure().invariant_factors == [3]
    assert layer_group([GA(F3), GM(F3)], FinitePoint(F3, F3)).structure().is_trivial


def test_trivial_unit_group():
    assert compute_order([GM(F2), GM(F2)], F2, 1).order == 1


@pytest.mark.parametrize("F", [F2, F3])
@pytest.mark.parametrize("names", [("GA", "GA"), ("GA", "GM"), ("GM", "GM"), ("GA", "J"), ("GM", "J"), ("J", "J")])
def test_structured_matches_naive(F, names):
    fns = [fn_of(n, F) for n in names]
    for d in (1, 2):
        a = build_presentation(fns, F, d).structure
        b = build_naive_presentation(fns, F, d).structure
        assert (a.invariant_factors, a.free_rank) == (b.invariant_factors, b.free_rank)


def test_structured_matches_naive_triple():
    fns = [GM(F2)] * 3
    for d in (1, 2, 3):
        a = build_presentation(fns, F2, d).structure
        b = build_naive_presentation(fns, F2, d).structure
        assert (a.invariant_factors, a.free_rank) == (b.invariant_factors, b.free_rank)


@pytest.mark.parametrize("F,names,d", [(F3, ("GA", "GM"), 2), (F2, ("GM", "GM"), 3), (F3, ("J", "GA"), 2)])
def test_relation_instances_hold(F, names, d):
    fns = [fn_of(n, F) for n in names]
    pres = build_presentation(fns, F, d, keep_instances=True)
    assert pres.instances
    lat = pres.lattice()
    for inst in pres.instances:
        diff = combination_vector([(1, inst.lhs), (-1, inst.rhs)], pres)
        assert lat.contains(diff)[0], inst.rule


@pytest.mark.parametrize("F,names", [(F2, ("GA", "GM")), (F3, ("GA", "J")), (F3, ("GM", "GA", "GA"))])
def test_commutativity(F, names):
    base = shape(compute_order([fn_of(n, F) for n in names], F, 2))
    for perm in itertools.permutations(names):
        assert shape(compute_order([fn_of(n, F) for n in perm], F, 2)) == base


@pytest.mark.parametrize("F,name", [(F2, "GA"), (F3, "GM"), (F5, "GM"), (F3, "J")])
def test_unit_functor(F, name):
    for d in (1, 2):
        single = shape(compute_order([fn_of(name, F)], F, d))
        assert shape(compute_order([CONST(F), fn_of(name, F)], F, d)) == single
        assert shape(compute_order([fn_of(name, F), CONST(F)], F, d)) == single


def test_single_functor_is_the_group():
    for d in (1, 2, 3):
        assert compute_order([GM(F5)], F5, d).invariant_factors == [4]
        assert compute_order([GA(F2)], F2, d).invariant_factors == [2]


@pytest.mark.parametrize("F,names,expected", [
    (F3, ("GA", "GM"), 1), (F5, ("GA", "GM"), 1), (F2, ("GM", "GM", "GM"), 1), (F3, ("GM", "GA", "GA"), 1),
])
def test_vanishing_cases(F, names, expected):
    assert compute_order([fn_of(n, F) for n in names], F, 2).order == expected


def test_ga_elliptic_vanishes():
    assert compute_order([GA(F5), elliptic(F5, 1, 1)], F5, 2).order == 1


def test_pinned_regressions():
    ga2 = [shape(compute_order([GA(F2)] * 2, F2, d)) for d in (1, 2, 3)]
    assert ga2 == [([2], 0), ([2, 2], 0), ([2, 2, 2, 2], 0)]
    ga3 = [shape(compute_order([GA(F3)] * 2, F3, d)) for d in (1, 2, 3)]
    assert ga3 == [([3], 0), ([3, 3], 0), ([3, 3, 3, 3], 0)]
    gm3 = [shape(compute_order([GM(F3)] * 2, F3, d)) for d in (1, 2, 3)]
    assert gm3 == [([2], 0), ([8], 0), ([8], 0)]
    gm2 = [shape(compute_order([GM(F2)] * 2, F2, d)) for d in (1, 2, 3)]
    assert gm2 == [([], 0), ([3], 0), ([3], 0)]
    jj = [shape(compute_order([fn_of("J", F3)] * 2, F3, d)) for d in (1, 2)]
    assert jj == [([3], 0), ([3, 3], 0)]


def test_stabilization_flag():
    scan = stabilization_scan([GM(F3), GM(F3)], F3, range(1, 4))
    assert scan.stabilized and scan.final.invariant_factors == [8]
    scan = stabilization_scan([GA(F2), GA(F2)], F2, range(1, 4))
    assert not scan.stabilized


def test_low_layer_image_monotone():
    orders = [low_layer_image_order(build_presentation([GA(F2)] * 2, F2, d), 1) for d in (1, 2, 3, 4)]
    assert all(a >= b for a, b in zip(orders, orders[1:]))
    orders = [low_layer_image_order(build_presentation([GM(F3)] * 2, F3, d), 1) for d in (1, 2, 3)]
    assert all(a >= b for a, b in zip(orders, orders[1:]))


@pytest.mark.parametrize("q,n", [(2, 2), (3, 2), (5, 2), (2, 3), (3, 3)])
def test_gm_closed_form_matches_engine(q, n):
    F = make_field(q, 1)
    for d in (1, 2, 3):
        res = compute_order([GM(F)] * n, F, d)
        assert gm_power_scan(q, n, d).structure.invariant_factors == res.invariant_factors


@pytest.mark.parametrize("q,n,bounds", [(2, 2, [1, 6, 6]), (3, 2, [4, 16, 16]), (5, 2, [8, 16, 16]),
                                        (2, 3, [1, 2, 21]), (3, 3, [2, 4, 39])])
def test_gm_low_layers_die_eventually(q, n, bounds):
    assert [gm_power_vanishing_bound(q, n, d) for d in (1, 2, 3)] == bounds



def test_symbol_multilinear():
    E = extension(F3, 2)
    pres = build_presentation([GA(F3), GA(F3)], F3, 2)
    pt = FinitePoint(F3, E)
    els = [GroupValue(GA(F3), E, x) for x in E.elements()]
    for a, b, c in itertools.islice(itertools.product(els, repeat=3), 0, 729, 37):
        lhs = pres.evaluate(Symbol(pres.functors, pt, (a + b, c)))
        r1 = pres.evaluate(Symbol(pres.functors, pt, (a, c)))
        r2 = pres.evaluate(Symbol(pres.functors, pt, (b, c)))
        assert pres.lattice().contains([x - y - z for x, y, z in zip(lhs, r1, r2)])[0]


def test_identity_entry_gives_zero():
    E = extension(F2, 2)
    pres = build_presentation([GM(F2), GM(F2)], F2, 2)
    g = GroupValue(GM(F2), E, E.gen())
    one = GroupValue(GM(F2), E, E.one())
    assert not any(pres.evaluate(Symbol(pres.functors, FinitePoint(F2, E), (g, one))))
    # {g, g} at F4/F2 hits the Z/3 layer: dlog(g) * dlog(g) times the generator
    v = pres.evaluate(Symbol(pres.functors, FinitePoint(F2, E), (g, g)))
    st_ = value_group(GM(F2), E)
    k = st_.dlog(g)[0]
    assert sorted(x % 3 for x in v if x % 3) == [k * k % 3]


def test_degree_beyond_bound_rejected():
    E = extension(F2, 3)
    pres = build_presentation([GA(F2), GA(F2)], F2, 2)
    a = GroupValue(GA(F2), E, E.gen())
    with pytest.raises(MackeyError):
        pres.evaluate(Symbol(pres.functors, FinitePoint(F2, E), (a, a)))


def test_pushforward_symbol_transitive():
    F4, F16 = extension(F2, 2), extension(F2, 4)
    a = GroupValue(GA(F2), F16, F16.gen())
    s = Symbol((GA(F2), GA(F2)), FinitePoint(F16, F16), (a, a))
    assert pushforward_symbol(s, F16) == s
    assert pushforward_symbol(pushforward_symbol(s, F4), F2) == pushforward_symbol(s, F2)
    with pytest.raises(MackeyError):
        pushforward_symbol(s, extension(F2, 3))


def test_pushforward_symbol_evaluation():
    # {g, g}_{F4/F4} rebased to F2 is the layer element at F4 in the presentation over F2
    F4 = extension(F2, 2)
    g = GroupValue(GM(F2), F4, F4.gen())
    s = Symbol((GM(F2), GM(F2)), FinitePoint(F4, F4), (g, g))
    t = pushforward_symbol(s, F2)
    assert t.point == FinitePoint(F2, F4)
    pres = build_presentation(t.functors, F2, 2)
    assert any(pres.evaluate(t))


@given(st.integers(0, 8), st.integers(0, 8), st.integers(0, 8))
def test_bilinearity_ga(i, j, k):
    E = extension(F3, 2)
    els = list(E.elements())
    fns = (GA(F3), GA(F3))
    pres = build_presentation(fns, F3, 2)
    pt = FinitePoint(F3, E)
    a, b, c = (GroupValue(GA(F3), E, els[x]) for x in (i, j, k))
    lhs = pres.evaluate(Symbol(fns, pt, (a, b + c)))
    rhs = [x + y for x, y in zip(pres.evaluate(Symbol(fns, pt, (a, b))), pres.evaluate(Symbol(fns, pt, (a, c))))]
    assert pres.lattice().contains([x - y for x, y in zip(lhs, rhs)])[0]
