import itertools

import pytest
from hypothesis import given, strategies as st

from mackeyprod.zlinalg import (IntMatrix, check_combination, cokernel_structure, determinant,
                                diagonal, image_contains, smith_normal_form)


def _snf_diag(rows, ncols=None):
    m = IntMatrix.from_dense(rows, ncols)
    U, S, V = smith_normal_form(m)
    assert U @ m @ V == S
    assert abs(determinant(U)) == 1 and abs(determinant(V)) == 1
    d = diagonal(S)
    for a, b in zip(d, d[1:]):
        assert b == 0 or (a != 0 and b % a == 0)
    assert all(v == 0 for (i, j), v in S.entries.items() if i != j)
    return d


def test_snf_examples():
    assert _snf_diag([[2, 0], [0, 3]]) == [1, 6]
    assert _snf_diag([[2, 4], [6, 8]]) == [2, 4]
    assert _snf_diag([[0, 0], [0, 0]]) == [0, 0]


def test_snf_zero_matrix_identity_transforms():
    m = IntMatrix(2, 3)
    U, S, V = smith_normal_form(m)
    assert U == IntMatrix.identity(2) and V == IntMatrix.identity(3)


def test_duplicate_entries_coalesce():
    m = IntMatrix(1, 1, [(0, 0, 2), (0, 0, 3)])
    assert m.to_dense() == [[5]]


def test_cokernel_examples():
    c = cokernel_structure(IntMatrix(0, 2), 2)
    assert c.free_rank == 2 and c.invariant_factors == []
    c = cokernel_structure(IntMatrix.from_dense([[2], [3]]), 1)
    assert c.is_trivial
    c = cokernel_structure(IntMatrix.from_dense([[2, 2], [0, 4]]), 2)
    assert c.invariant_factors == [2, 4] and c.order == 8


def _coset_count(rows, n, box):
    """Brute force |Z^n / L| by counting classes of a box modulo L (L of full rank)."""
    # reduce box vectors by Hermite-free approach: classes of Z^n/L equal classes of (Z/box)^n
    # when box * Z^n is contained in L.
    reps = set()
    for v in itertools.product(range(box), repeat=n):
        reps.add(_canonical(v, rows, n, box))
    return len(reps)


def _canonical(v, rows, n, box):
    best = tuple(v)
    seen = {best}
    frontier = [best]
    while frontier:
        cur = frontier.pop()
        for r in rows:
            w = tuple((cur[i] + r[i]) % box for i in range(n))
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return min(seen)


small_rows = st.lists(st.lists(st.integers(-4, 4), min_size=2, max_size=2), min_size=2, max_size=3)


@given(small_rows)
def test_cokernel_order_matches_coset_enumeration(rows):
    c = cokernel_structure(IntMatrix.from_dense(rows, 2), 2)
    d = _snf_diag(rows, 2)
    if c.free_rank:
        assert 0 in d[:2] or len([x for x in d if x]) < 2
        return
    order = c.order
    # box = order kills Z^n / L, so order*Z^n lies in L
    rows_plus = [list(r) for r in rows] + [[order, 0], [0, order]]
    assert _coset_count(rows_plus, 2, order) == order


@given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=1, max_size=4))
def test_snf_properties_random(rows):
    d = _snf_diag(rows, 3)
    c = cokernel_structure(IntMatrix.from_dense(rows, 3), 3)
    nz = [abs(x) for x in d if x]
    assert c.free_rank == 3 - len(nz)
    assert sorted(c.invariant_factors) == sorted(x for x in nz if x != 1)


def test_image_contains_examples():
    m = IntMatrix.from_dense([[2]])
    ok, cert = image_contains(m, [0])
    assert ok and cert["combination"] == {}
    ok, cert = image_contains(m, [1])
    assert not ok and cert["invariant"] == 2


def _brute_member(rows, v, bound=10):
    n = len(rows)
    for coeffs in itertools.product(range(-bound, bound + 1), repeat=n):
        if all(sum(c * r[j] for c, r in zip(coeffs, rows)) == v[j] for j in range(len(v))):
            return True
    return False


@given(st.lists(st.lists(st.integers(-3, 3), min_size=2, max_size=2), min_size=1, max_size=2),
       st.lists(st.integers(-4, 4), min_size=2, max_size=2))
def test_image_contains_matches_brute_force(rows, v):
    m = IntMatrix.from_dense(rows, 2)
    ok, cert = image_contains(m, v)
    if ok:
        assert check_combination(m, v, cert["combination"])
        assert _brute_member(rows, v, 40) or not all(abs(c) <= 40 for c in cert["combination"].values())
    else:
        assert not _brute_member(rows, v)
