from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from occupancy.errors import DegenerateSigmaError, ParameterDomainError
from occupancy.moments import g_moments
from occupancy.precision import MP
from occupancy.scheme import SchemeParams, derive, diagnostics, elementary_symmetric

from oracles import allocations_pmf, schemes, subset_elementary


def _oracle_mean_var(N, n):
    pmf = allocations_pmf(N, n)
    mean = sum(k * p for k, p in pmf.items())
    var = sum((k - mean) ** 2 * p for k, p in pmf.items())
    return mean, var


# values frozen from allocations_pmf (9, 24 and 10 allocations)
@pytest.mark.parametrize(
    "N, n, Q, mean, sigma2, b, var",
    [
        (3, (1, 1), "4/9", "4/3", "4/81", "1/2", "2/9"),
        (4, (2, 1), "3/8", "3/2", "3/64", "1/3", "1/4"),
    ],
)
def test_derive_small_cases(N, n, Q, mean, sigma2, b, var):
    d = derive(SchemeParams(N, n))
    assert d.Q_s == Fraction(Q)
    assert d.mean_mu0 == Fraction(mean)
    assert d.sigma2 == Fraction(sigma2)
    assert d.b_N == Fraction(b)
    assert d.var_mu0 == Fraction(var)
    assert (d.mean_mu0, d.var_mu0) == _oracle_mean_var(N, n)


def test_single_set_is_degenerate():
    d = derive(SchemeParams(5, (3,)))
    assert d.Q_s == Fraction(2, 5)
    assert d.mean_mu0 == 2
    assert d.sigma2 == 0
    assert d.var_mu0 == 0
    assert d.degenerate
    with pytest.raises(DegenerateSigmaError):
        d.b_N


@pytest.mark.parametrize("N, n", [(1, (1,)), (3, ()), (3, (3,)), (3, (0, 1)), (4, (1, 5))])
def test_invalid_params_rejected(N, n):
    with pytest.raises(ParameterDomainError):
        SchemeParams(N, n)


def test_from_proportions():
    assert SchemeParams.from_proportions(20, [Fraction(3, 10), Fraction(1, 2)]).n == (6, 10)
    with pytest.raises(ParameterDomainError):
        SchemeParams.from_proportions(15, [Fraction(3, 10)])


def test_support_bounds():
    assert SchemeParams(4, (2, 1)).support == (1, 2)
    assert SchemeParams(2, (1, 1)).support == (0, 1)


@given(schemes(max_N=7, max_s=3))
def test_variance_matches_enumeration(case):
    N, n = case
    d = derive(SchemeParams(N, n))
    mean, var = _oracle_mean_var(N, n)
    assert d.mean_mu0 == mean
    assert d.var_mu0 == var
    if not d.degenerate:
        assert d.var_mu0 == N * d.sigma2 * (1 + d.b_N)


def test_ordered_tuple_reading_overcounts():
    # ordered nu-tuples would double the nu = 2 term
    d = derive(SchemeParams(3, (1, 1)))
    ordered = 3 * d.sigma2 + 3 * d.Q_s**2 * (2 * d.elem_sym[2]) / (3 - 1)
    assert ordered == Fraction(8, 27)
    assert d.var_mu0 == Fraction(2, 9)


@given(schemes(max_N=12, max_s=4))
def test_elementary_symmetric_matches_subsets(case):
    N, n = case
    r = derive(SchemeParams(N, n)).r
    e = elementary_symmetric(r)
    assert len(e) == len(r) + 1
    for nu in range(len(r) + 1):
        assert e[nu] == subset_elementary(r, nu)


def test_b_N_decays_like_one_over_N():
    Ns = [20, 40, 80, 160, 320]
    bs = [derive(SchemeParams.from_proportions(N, [Fraction(3, 10), Fraction(1, 2)])).b_N for N in Ns]
    slope = np.polyfit(np.log(Ns), np.log([float(abs(b)) for b in bs]), 1)[0]
    assert slope <= -0.9


@given(schemes(max_N=30, max_s=4))
def test_derived_ranges(case):
    d = derive(SchemeParams(*case))
    assert all(0 < p < 1 for p in d.p)
    assert 0 < d.Q_s < 1
    assert d.sigma2 >= 0
    assert d.alpha > 0


def test_diagnostics_small_case():
    d = derive(SchemeParams(3, (1, 1)))
    diag = diagnostics(d, g_moments(d))
    assert abs(diag.T_N - MP.sqrt(6) / 3) < MP.mpf(10) ** -30
    expected_L = (MP.mpf(289) / 72 + 2 * MP.mpf(4.5) ** 1.5 * MP.mpf(17) / 81) / MP.mpf(3) ** 1.5
    assert abs(diag.L_N - expected_L) < MP.mpf(10) ** -30
    assert abs(float(diag.L_N) - 1.5437) < 1e-4
    assert diag.ratio_325 > 0 and diag.sigma_Eg3 > 0


def test_diagnostics_reject_degenerate():
    d = derive(SchemeParams(5, (3,)))
    with pytest.raises(DegenerateSigmaError):
        diagnostics(d, None)
