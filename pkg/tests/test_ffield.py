import itertools

import pytest
from hypothesis import given, strategies as st

from mackeyprod.ffield import (FieldError, conjugates, embed, extension, format_elem, frobenius,
                               make_field, norm, parse_elem, parse_field, primitive_element, trace)


def _lex_least_irreducible(p, d):
    """Brute force: smallest monic degree-d poly (low coefficients first) with no factor."""

    def is_irr(c):
        # c low-first, monic; check divisibility by every monic poly of degree 1..d//2
        for e in range(1, d // 2 + 1):
            for g in itertools.product(range(p), repeat=e):
                g = list(g) + [1]
                r = list(c)
                for i in range(len(r) - 1, e - 1, -1):
                    q = r[i] % p
                    if q:
                        for j in range(e + 1):
                            r[i - e + j] = (r[i - e + j] - q * g[j]) % p
                if not any(x % p for x in r[:e]):
                    return False
        return True

    cands = sorted((tuple(t) + (1,) for t in itertools.product(range(p), repeat=d)))
    for c in cands:
        if is_irr(c):
            return c


@pytest.mark.parametrize("p,d", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (7, 2)])
def test_defining_poly_is_lex_least(p, d):
    assert make_field(p, d).defining_poly == _lex_least_irreducible(p, d)


def test_f4_poly():
    assert make_field(2, 2).defining_poly == (1, 1, 1)


def test_bad_fields():
    with pytest.raises(FieldError):
        make_field(4, 1)
    with pytest.raises(FieldError):
        embed(make_field(2, 2).gen(), make_field(2, 3))
    with pytest.raises(FieldError):
        embed(make_field(2, 1).one(), make_field(3, 2))


def test_text_round_trip():
    F = make_field(3, 2)
    for a in F.elements():
        assert parse_elem(format_elem(a)) == a
    assert parse_field("3^2") == F


def test_embed_unit_and_identity():
    F2, F4 = make_field(2, 1), make_field(2, 2)
    assert embed(F2.one(), F4) == F4.one()
    g = F4.gen()
    assert embed(g, F4) == g


def test_embed_f4_into_f16_is_root():
    F4, F16 = make_field(2, 2), make_field(2, 4)
    h = embed(F4.gen(), F16)
    roots = [z for z in F16.elements() if z * z + z + 1 == F16.zero()]
    assert h in roots and len(roots) == 2


def test_embedding_composes():
    F2, F4, F16 = make_field(2, 1), make_field(2, 2), make_field(2, 4)
    for a in F4.elements():
        assert embed(embed(a, F4), F16) == embed(a, F16)
    F3, F9, F81 = make_field(3, 1), make_field(3, 2), make_field(3, 4)
    for a in F9.elements():
        assert embed(a, F81) == embed(embed(a, F9), F81)


def test_embedding_is_ring_hom():
    F9, F81 = make_field(3, 2), make_field(3, 4)
    for a, b in itertools.product(list(F9.elements())[:9], repeat=2):
        assert embed(a * b, F81) == embed(a, F81) * embed(b, F81)
        assert embed(a + b, F81) == embed(a, F81) + embed(b, F81)


def test_frobenius_examples():
    F2, F4 = make_field(2, 1), make_field(2, 2)
    g = F4.gen()
    assert frobenius(g, F2) == g + F4.one()
    assert frobenius(g, F2) == g**2
    F9 = make_field(3, 2)
    for a in F9.elements():
        assert frobenius(frobenius(a, make_field(3, 1)), make_field(3, 1)) == a


def test_frobenius_fixes_subfield():
    F4, F16 = make_field(2, 2), make_field(2, 4)
    for c in F4.elements():
        assert frobenius(embed(c, F16), F4) == embed(c, F16)


def test_trace_norm_examples():
    F2, F4 = make_field(2, 1), make_field(2, 2)
    g = F4.gen()
    assert trace(g, F2) == F2.one()
    assert norm(g, F2) == F2.one()
    F5, F25 = make_field(5, 1), make_field(5, 2)
    for c in F5.elements():
        assert trace(embed(c, F25), F5) == c * 2
    assert norm(F25.zero(), F5) == F5.zero()


@pytest.mark.parametrize("p,chain", [(2, (1, 2, 4)), (3, (1, 2, 4)), (2, (1, 3, 6)), (5, (1, 2, 4))])
def test_trace_norm_transitive(p, chain):
    F, K, E = (make_field(p, d) for d in chain)
    for a in itertools.islice(E.elements(), 200):
        assert trace(a, F) == trace(trace(a, K), F)
        assert norm(a, F) == norm(norm(a, K), F)


@pytest.mark.parametrize("p,d,k", [(2, 1, 2), (2, 1, 3), (2, 1, 4), (2, 2, 2), (3, 1, 2), (3, 1, 3),
                                   (3, 1, 4), (5, 1, 2), (2, 1, 1)])
def test_trace_surjective(p, d, k):
    F = make_field(p, d)
    E = extension(F, k)
    image = {trace(a, F) for a in E.elements()}
    assert image == set(F.elements())


@pytest.mark.parametrize("p,d", [(2, 2), (3, 2), (2, 3)])
def test_trace_norm_homomorphisms(p, d):
    F, E = make_field(p, 1), make_field(p, d)
    els = list(E.elements())
    for a, b in itertools.product(els, repeat=2):
        assert trace(a + b, F) == trace(a, F) + trace(b, F)
        assert norm(a * b, F) == norm(a, F) * norm(b, F)


@pytest.mark.parametrize("p,d", [(2, 2), (3, 2), (2, 4)])
def test_trace_adjunction(p, d):
    F = make_field(p, d // 2 if d == 4 else 1)
    E = make_field(p, d)
    for c in F.elements():
        for a in itertools.islice(E.elements(), 40):
            assert trace(embed(c, E) * a, F) == c * trace(a, F)


def test_conjugates_count_and_primitive():
    F3, F27 = make_field(3, 1), make_field(3, 3)
    g = primitive_element(F27)
    assert len(set(conjugates(g, F3))) == 3
    powers = {g**i for i in range(26)}
    assert len(powers) == 26


@given(st.integers(0, 80), st.integers(0, 80))
def test_field_axioms_f81(i, j):
    F = make_field(3, 4)
    els = list(F.elements())
    a, b = els[i], els[j]
    assert a * b == b * a
    assert (a + b) * a == a * a + b * a
    if not b.is_zero():
        assert (a / b) * b == a
