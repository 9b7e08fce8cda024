from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sigmaquiver import chi
from sigmaquiver.chi import (
    BadPrimeError,
    ChiPoly,
    FiberFamily,
    PolynomialityError,
    chi_closed_form,
    chi_family,
    count_family,
    count_prepared,
    degree_bound,
    enumerate_family,
    euler,
    gaussian_poly,
    interpolate,
    sla1_family,
)
from sigmaquiver.fields import get_field
from sigmaquiver.linalg import enumerate_subspaces, gaussian_binomial, standard_symplectic


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=5))
def test_interpolation_recovers_integer_polynomials(coeffs):
    p = ChiPoly(tuple(coeffs), ())
    qs = [2, 3, 5, 7, 11, 13, 17][: len(coeffs) + 2]
    got = interpolate([(q, p(q)) for q in qs], len(coeffs) - 1)
    want = list(coeffs)
    while len(want) > 1 and want[-1] == 0:
        want.pop()
    assert list(got.coeffs) == want and euler(got) == sum(coeffs)


def test_interpolation_rejects_non_polynomial_data():
    with pytest.raises(PolynomialityError):
        interpolate([(2, 1), (3, 2), (5, 1), (7, 9)], 1)
    with pytest.raises(PolynomialityError):
        interpolate([(2, 0), (4, 1), (6, 3)], 1)  # fit (q-2)/2 is not integral
    with pytest.raises(ValueError):
        interpolate([(2, 1), (3, 1)], 1)


@pytest.mark.parametrize("n,k", [(3, 1), (4, 2), (5, 2), (6, 3)])
def test_gaussian_poly_matches_counts(n, k):
    poly = ChiPoly(gaussian_poly(n, k), ())
    for q in (2, 3, 4, 5):
        assert poly(q) == gaussian_binomial(n, k, q)
    assert chi_closed_form("grassmannian", n, k).coeffs == gaussian_poly(n, k)
    assert euler(chi_closed_form("projective", n)) == n + 1


def test_closed_form_errors():
    with pytest.raises(ValueError):
        chi_closed_form("grassmannian", 2, 3)
    with pytest.raises(ValueError):
        chi_closed_form("flag", 2)


def test_small_families():
    g = chi_family(FiberFamily("gr24", 4, 2))
    assert g.coeffs == (1, 1, 2, 1, 1)
    lg = chi_family(FiberFamily("lg24", 4, 2, gram=standard_symplectic(4)))
    assert lg.coeffs == (1, 1, 1, 1) and euler(lg) == 4


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sla1_euler_is_n(n):
    poly = chi_family(sla1_family(n))
    assert euler(poly) == n
    assert poly.coeffs == tuple([0] + [1] * n)
    for q in (2, 3):
        assert count_family(sla1_family(n), q) == len(enumerate_family(sla1_family(n), q))


def test_bad_primes_are_skipped():
    fam = FiberFamily("line", 2, 1, lower=np.array([[1, 2]]), upper=np.array([[1, 2], [0, 3]]))
    # the upper bound drops rank mod 3
    with pytest.raises(BadPrimeError):
        count_family(fam, 3)
    poly = chi_family(fam)
    assert poly.coeffs == (1,) and all(q != 3 for q, _ in poly.sampled)
    fixed = FiberFamily("fixed", 2, 1, char=5)
    with pytest.raises(BadPrimeError):
        count_family(fixed, 7)
    assert [q for q, _ in chi_family(fixed).sampled] == [5, 25, 125, 625]


@st.composite
def lagrangian_family(draw):
    q = draw(st.sampled_from([2, 3]))
    m = draw(st.integers(1, 3 if q == 2 else 2))
    n = 2 * m
    F = get_field(q)
    gram = standard_symplectic(n)
    pick = lambda xs: xs[draw(st.integers(0, len(xs) - 1))]
    lags = list(enumerate_subspaces(n, m, F, gram))
    a = draw(st.integers(0, m - 1))
    lower = pick(list(enumerate_subspaces(n, a, F, gram)))
    upper = None
    if draw(st.booleans()):
        upper = pick(list(enumerate_subspaces(n, draw(st.integers(m, n)), F))).basis
    meets = []
    for _ in range(draw(st.integers(0, 2))):
        meets.append((pick(lags).basis, draw(st.integers(0, m))))
    fam = FiberFamily("lag", n, m, lower=lower.basis, upper=upper, meets=meets, gram=gram, char=q)
    return fam, q


@given(lagrangian_family())
def test_symplectic_reduction_matches_direct_count(case):
    fam, q = case
    P = chi._prepare(fam, get_field(q))
    reduced, _ = count_prepared(P, fam.k)
    direct, _ = count_prepared(P, fam.k, reduce=False)
    assert reduced == direct == len(enumerate_family(fam, q))


@pytest.mark.parametrize("m", [1, 2, 3])
def test_degree_bound_dominates(m):
    fam = sla1_family(m)
    assert chi_family(fam).degree <= degree_bound(fam) == m
