import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from occupancy.decomp import extract_bernoulli, pgf_coefficients
from occupancy.errors import DegenerateSigmaError
from occupancy.exact import exact_pmf
from occupancy.moments import EdgeworthCoeffs
from occupancy.edgeworth import (
    approx_gaussian,
    approx_thm2,
    approx_thm3,
    approx_thm4,
    approx_what_u,
    approximate,
    calibrated_thm4_sign,
    default_coeffs,
    hermite,
    normal_density,
    sup_error_slope,
    thm3_density,
    thm4_sign_errors,
    w_hat,
)
from occupancy.precision import MP
from occupancy.scheme import SchemeParams, derive

from oracles import HERMITE_CLOSED

TIGHT = MP.mpf(10) ** -30
P_SWEEP = [Fraction(3, 10), Fraction(1, 2)]
N_SWEEP = [20, 40, 80, 160, 320]


def _sweep(method, variant="fourier", p=P_SWEEP, Ns=N_SWEEP):
    return [(N, approximate(method, SchemeParams.from_proportions(N, p), variant=variant).sup_error) for N in Ns]


def test_hermite_values():
    assert hermite(2, 0) == -1
    assert hermite(4, 1) == -2
    assert hermite(6, 0) == -15
    with pytest.raises(ValueError):
        hermite(5, 1.0)


def test_hermite_recurrence_matches_closed_forms():
    rng = random.Random(7)
    for _ in range(1000):
        x = MP.mpf(rng.uniform(-10, 10))
        for nu, closed in HERMITE_CLOSED.items():
            assert abs(hermite(nu, x) - closed(x)) <= MP.mpf(10) ** -30


def test_w_hat_examples():
    zero = EdgeworthCoeffs(MP.mpf(0), MP.mpf(0), MP.mpf(0))
    assert abs(w_hat(0, zero, 10) - 1 / MP.sqrt(2 * MP.pi)) < TIGHT
    assert abs(float(w_hat(0, zero, 10)) - 0.3989423) < 1e-7
    half = EdgeworthCoeffs(MP.mpf(0), MP.mpf(1) / 2, MP.mpf(0))
    expected = (1 + MP.mpf(-15) / 72 * MP.mpf(1) / 4 / 100) / MP.sqrt(2 * MP.pi)
    assert abs(w_hat(0, half, 100) - expected) < TIGHT
    assert abs(w_hat(40, half, 100)) < MP.mpf(10) ** -300


def test_w_hat_printed_weight():
    c = EdgeworthCoeffs(MP.mpf(0), MP.mpf(0), MP.mpf(1), variant="printed")
    f = EdgeworthCoeffs(MP.mpf(0), MP.mpf(0), MP.mpf(1))
    assert abs((w_hat(0, f, 1) / normal_density(0) - 1) - 3 * MP.mpf(1) / 24) < TIGHT
    assert abs((w_hat(0, c, 1) / normal_density(0) - 1) - 3 * MP.mpf(1) / 32) < TIGHT


def test_w_hat_integrates_to_one():
    c = EdgeworthCoeffs(MP.mpf("0.7"), MP.mpf("0.9"), MP.mpf("-1.3"))
    total = MP.quad(lambda x: w_hat(x, c, 5), [-12, -4, 0, 4, 12])
    assert abs(total - 1) < 1e-10


def test_w_hat_approaches_normal_density():
    c = EdgeworthCoeffs(MP.mpf(1), MP.mpf("0.5"), MP.mpf(-2))
    grid = [MP.mpf(i) / 10 for i in range(-60, 61)]
    gaps = [max(abs(w_hat(x, c, N) - normal_density(x)) for x in grid) for N in (100, 400, 1600, 6400)]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    slope = sup_error_slope(list(zip((100, 400, 1600, 6400), gaps)))
    assert -0.6 < slope < -0.4


def test_thm2_coordinates():
    rep = approx_thm2(SchemeParams(3, (1, 1)))
    coords = {row.k: row.coord for row in rep.rows}
    assert abs(coords[1] + MP.sqrt(3) / 2) < TIGHT
    assert abs(coords[2] - MP.sqrt(3)) < TIGHT
    assert rep.normalization == "nsigma"
    assert rep.sup_error == max(row.abs_err for row in rep.rows)


def test_thm3_small_case():
    params = SchemeParams(3, (1, 1))
    pmf = exact_pmf(params)
    decomp = extract_bernoulli(pgf_coefficients(pmf))
    rep = approx_thm3(decomp, pmf)
    coords = {row.k: row.coord for row in rep.rows}
    assert abs(coords[1] + 1 / MP.sqrt(2)) < TIGHT
    assert abs(coords[2] - MP.sqrt(2)) < TIGHT
    assert abs(rep.meta["L3"] - 1 / MP.sqrt(2)) < TIGHT
    assert abs(rep.meta["L4"] + MP.mpf(3) / 2) < TIGHT
    assert thm3_density(MP.mpf("0.3"), 0, 0) == normal_density(MP.mpf("0.3"))


def test_thm4_correction_size_and_zero_case():
    params = SchemeParams(3, (1, 1))
    rep = approx_thm4(params, sign=Fraction(-1, 2))
    assert rep.meta["b_N_tilde"] == Fraction(3, 2)
    # with b_N removed the approximant is exactly W-hat at u_k
    coeffs = default_coeffs(params)
    plain = approx_what_u(params, coeffs=coeffs)
    for row in plain.rows:
        assert row.approx == w_hat(row.coord, coeffs, 3)


def test_calibrated_sign():
    errors = thm4_sign_errors()
    assert calibrated_thm4_sign() == Fraction(-1, 2)
    assert errors[Fraction(-1, 2)] < errors[Fraction(1, 2)]


def test_thm4_beats_uncorrected_at_calibration_point():
    params = SchemeParams.from_proportions(160, P_SWEEP)
    pmf = exact_pmf(params)
    assert approx_thm4(params, pmf).sup_error <= approx_what_u(params, pmf).sup_error


def test_thm2_sweep_decreases_and_beats_gaussian():
    thm2 = _sweep("thm2")
    gauss = _sweep("gaussian")
    assert all(b[1] < a[1] for a, b in zip(thm2, thm2[1:]))
    assert all(g[1] >= t[1] for g, t in zip(gauss[2:], thm2[2:]))
    assert -2.0 <= sup_error_slope(thm2) <= -1.0


def test_rate_with_nonzero_skewness():
    # with two sets M3 vanishes whenever one p_l = 1/2, as in the main sweep
    p = [Fraction(1, 5), Fraction(2, 5)]
    assert abs(default_coeffs(SchemeParams.from_proportions(20, p)).M3) > 0.1
    assert abs(default_coeffs(SchemeParams.from_proportions(20, P_SWEEP)).M3) < TIGHT
    sweep = _sweep("thm2", p=p)
    assert all(b[1] < a[1] for a, b in zip(sweep, sweep[1:]))
    assert -2.0 <= sup_error_slope(sweep) <= -1.0


def test_printed_coefficients_converge_slower():
    assert sup_error_slope(_sweep("thm2", variant="printed")) > -1.1


def test_gaussian_shallower_than_thm2_symmetric_case():
    p = [Fraction(1, 2), Fraction(1, 2)]
    Ns = [10, 20, 30]
    assert sup_error_slope(_sweep("gaussian", p=p, Ns=Ns)) > sup_error_slope(_sweep("thm2", p=p, Ns=Ns))


@given(st.permutations([7, 3, 12]), st.sampled_from(["thm2", "thm3", "thm4", "gaussian"]))
def test_set_order_does_not_matter(order, method):
    base = approximate(method, SchemeParams(20, (7, 3, 12)))
    other = approximate(method, SchemeParams(20, tuple(order)))
    for a, b in zip(base.rows, other.rows):
        assert a.k == b.k
        assert a.approx == b.approx


def test_slope_fit():
    assert abs(sup_error_slope([(N, N**-1.5) for N in (10, 20, 40, 80)]) + 1.5) < 1e-12
    assert abs(sup_error_slope([(N, 0.3) for N in (10, 20, 40)])) < 1e-12
    with pytest.raises(ValueError):
        sup_error_slope([(10, 1.0), (20, 0.0), (40, 0.5)])
    with pytest.raises(ValueError):
        sup_error_slope([(10, 1.0), (20, 0.5)])


def test_degenerate_sigma():
    with pytest.raises(DegenerateSigmaError):
        approx_thm2(SchemeParams(5, (3,)))
    with pytest.raises(DegenerateSigmaError):
        approx_thm4(SchemeParams(5, (3,)))


def test_gaussian_normalizations():
    params = SchemeParams(12, (4, 6))
    assert approx_gaussian(params).scale == 12 * derive(params).sigma2
    assert approx_gaussian(params, normalization="exact").scale == derive(params).var_mu0
    with pytest.raises(ValueError):
        approx_gaussian(params, normalization="other")
    with pytest.raises(ValueError):
        approximate("thm9", params)


def test_report_serialization():
    rep = approx_thm2(SchemeParams(6, (2, 3)))
    lines = rep.to_csv(digits=6).splitlines()
    assert lines[0] == "k,coord,approx,exact,abs_err"
    assert len(lines) == 1 + len(rep.rows)
    js = rep.to_json()
    assert js["method"] == "thm2"
    assert js["scale"] == str(rep.scale)
    assert js["rows"][0].keys() == {"k", "coord", "approx", "exact", "abs_err"}
