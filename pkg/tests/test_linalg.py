from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sigmaquiver.fields import QQ, get_field
from sigmaquiver.linalg import (
    Subspace,
    annihilator,
    batch_rank,
    enumerate_between,
    enumerate_subspaces,
    gaussian_binomial,
    is_isotropic,
    is_lagrangian,
    lagrangians_meeting,
    preimage,
    q_inverse,
    rank,
    rref,
    standard_symplectic,
)

fields = st.sampled_from([2, 3, 4, 5])


@st.composite
def subspace_pair(draw):
    q = draw(fields)
    n = draw(st.integers(1, 5))
    F = get_field(q)
    rows = lambda: np.array(draw(st.lists(st.lists(st.integers(0, q - 1), min_size=n, max_size=n), max_size=n)), dtype=np.int64).reshape(-1, n)
    return Subspace.span(F, n, rows()), Subspace.span(F, n, rows())


def test_rref_over_q():
    ech = rref([[1, 2, 3], [2, 4, 7]], QQ)
    assert ech.rank == 2 and ech.pivots == (0, 2)
    assert ech.echelon.tolist() == [[1, 2, 0], [0, 0, 1]]
    assert ech.kernel.tolist() == [[-2, 1, 0]]
    assert q_inverse(np.array([[2, 1], [1, 1]], dtype=object)).tolist() == [[1, -1], [-1, 2]]
    assert isinstance(rref([[Fraction(1, 2)]], QQ).echelon[0, 0], Fraction)


@given(subspace_pair())
def test_modular_dimension_formula(pair):
    a, b = pair
    assert (a + b).dim + (a & b).dim == a.dim + b.dim
    assert (a & b) <= a <= (a + b)
    assert (a & b) == (b & a) and (a + b) == (b + a)


@given(subspace_pair())
def test_canonical_form_is_unique(pair):
    a, _ = pair
    F = a.field
    if a.dim:
        # unipotent upper-triangular recombination
        g = np.triu(np.ones((a.dim, a.dim), dtype=np.int64))
        again = Subspace.span(F, a.n, F.matmul(g, a.basis))
        assert again == a and hash(again) == hash(a)


@given(subspace_pair(), st.data())
def test_preimage_image_adjunction(pair, data):
    a, b = pair
    F = a.field
    n = a.n
    m = np.array(data.draw(st.lists(st.lists(st.integers(0, F.q - 1), min_size=n, max_size=n), min_size=n, max_size=n)), dtype=np.int64)
    pre = preimage(m, b)
    assert pre.image(m) <= b
    # a maps into b exactly when a lies in the preimage
    assert (a.image(m) <= b) == (a <= pre)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_gaussian_counts(q):
    F = get_field(q)
    for n in range(5):
        for k in range(n + 1):
            assert sum(1 for _ in enumerate_subspaces(n, k, F)) == gaussian_binomial(n, k, q)


def test_enumerate_between_matches_filter():
    F = get_field(3)
    lo = Subspace.span(F, 4, [[1, 0, 0, 0]])
    hi = Subspace.span(F, 4, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1]])
    got = sorted(enumerate_between(lo, hi, 2))
    want = sorted(s for s in enumerate_subspaces(4, 2, F) if lo <= s <= hi)
    assert got == want and len(got) == 4


def test_annihilator_of_a_line():
    F = get_field(3)
    g = standard_symplectic(4)
    e1 = Subspace.span(F, 4, [[1, 0, 0, 0]])
    ann = annihilator(e1, g, "left")
    assert ann == Subspace.span(F, 4, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1]])


@pytest.mark.parametrize("q,count", [(2, 15), (3, 40), (5, 156), (7, 400)])
def test_lagrangian_grassmannian_counts(q, count):
    F = get_field(q)
    g = standard_symplectic(4)
    lags = list(enumerate_subspaces(4, 2, F, g))
    assert len(lags) == count
    assert all(is_lagrangian(L, g) for L in lags)


@pytest.mark.parametrize("q", [2, 3])
def test_lagrangians_meeting_oracle(q):
    F = get_field(q)
    g = standard_symplectic(6)
    D = Subspace.span(F, 6, np.eye(6, dtype=np.int64)[:3])
    lower = Subspace.span(F, 6, [[1, 0, 0, 0, 0, 0]])
    got = sorted(lagrangians_meeting(D, lower, g))
    want = sorted(L for L in enumerate_subspaces(6, 3, F, g) if lower <= L and (L & D).dim == 2)
    assert got == want


def test_isotropic_enumeration_prunes_correctly():
    F = get_field(2)
    g = standard_symplectic(4)
    iso = set(enumerate_subspaces(4, 1, F, g))
    assert len(iso) == 15  # every line is isotropic for an alternating form
    planes = [s for s in enumerate_subspaces(4, 2, F) if is_isotropic(s, g)]
    assert sorted(planes) == sorted(enumerate_subspaces(4, 2, F, g))


def test_rank_mod_p_vs_q():
    m = [[1, 1], [1, 3]]
    assert rank(m, QQ) == 2
    assert rank(np.array(m), get_field(2)) == 1


@given(st.sampled_from([2, 3, 4, 5]), st.integers(0, 4), st.integers(1, 5), st.data())
def test_batch_rank_matches_rank(q, r, c, data):
    F = get_field(q)
    raw = data.draw(st.lists(st.lists(st.lists(st.integers(0, q - 1), min_size=c, max_size=c), min_size=r, max_size=r), min_size=1, max_size=6))
    mats = np.array(raw, dtype=np.int64).reshape(len(raw), r, c)
    got = batch_rank(mats, F)
    assert list(got) == [rank(m, F) if m.size else 0 for m in mats]
