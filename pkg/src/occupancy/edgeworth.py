"""Local Edgeworth approximations to P{mu0 = k} and their errors.

Three approximants are compared against the exact PMF:

* ``thm2``: the density expansion evaluated at x_k = (k - N Q_s) / (sqrt(N) sigma)
  against sqrt(N) sigma P{mu0 = k};
* ``thm3``: the Poisson-binomial (Bernoulli decomposition) expansion in the
  exactly standardized coordinate u_k, against sqrt(Var mu0) P{mu0 = k};
* ``thm4``: the density expansion at u_k plus a b_N * H_2 correction that
  accounts for the exact variance;

plus ``gaussian`` (the bare normal density) and ``what_u`` (the density
expansion at u_k, no correction) as baselines.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateSigmaError
from .exact import ExactPmf, exact_pmf, pmf_moments
from .moments import EdgeworthCoeffs, edgeworth_coeffs, g_signed_moments, xi_moments
from .precision import MP, mpf
from .scheme import SchemeParams, derive

SUPPORTED_ORDERS = (2, 3, 4, 6)
CALIBRATION_CASE = (160, ("3/10", "1/2"))
METHODS = ("thm2", "thm3", "thm4", "gaussian", "what_u")


def hermite(nu: int, x):
    """Probabilists' Hermite polynomial He_nu(x) by the three-term recurrence."""
    if nu not in SUPPORTED_ORDERS:
        raise ValueError(f"Hermite order {nu} not supported; use one of {SUPPORTED_ORDERS}")
    x = mpf(x)
    prev, cur = MP.mpf(1), x
    for k in range(1, nu):
        prev, cur = cur, x * cur - k * prev
    return cur


def normal_density(x):
    x = mpf(x)
    return MP.exp(-x * x / 2) / MP.sqrt(2 * MP.pi)


def w_hat(x, coeffs: EdgeworthCoeffs, N: int):
    """Inverse Fourier transform of W_N: the expansion term by term.

    Each (it)^nu e^{-t^2/2} becomes He_nu(x) phi(x). The ``printed`` variant
    keeps the 1/32 weight on He_4 instead of the transform-consistent 1/24.
    """
    x = mpf(x)
    h4_weight = MP.mpf(1) / 24 if coeffs.variant == "fourier" else MP.mpf(1) / 32
    first = hermite(3, x) * coeffs.M3 / 6
    second = (
        hermite(6, x) * coeffs.M3**2 / 72
        + hermite(4, x) * coeffs.M4 * h4_weight
        + hermite(2, x) * coeffs.M2 / 4
    )
    return normal_density(x) * (1 + first / MP.sqrt(N) + second / N)


def thm3_density(u, L3, L4):
    u = mpf(u)
    bracket = 1 + hermite(3, u) * L3 / 6 + hermite(6, u) * L3**2 / 72 + hermite(4, u) * L4 / 24
    return normal_density(u) * bracket


@dataclass(frozen=True)
class ApproxRow:
    k: int
    coord: object
    approx: object
    exact: object

    @property
    def abs_err(self):
        return abs(self.approx - self.exact)


@dataclass
class ApproxReport:
    method: str
    normalization: str
    scale: Fraction
    rows: list
    meta: dict = field(default_factory=dict)

    @property
    def sup_error(self):
        return max(row.abs_err for row in self.rows)

    def to_csv(self, digits: int = 15) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "coord", "approx", "exact", "abs_err"])
        for row in self.rows:
            writer.writerow([row.k] + [MP.nstr(v, digits) for v in (row.coord, row.approx, row.exact, row.abs_err)])
        return buf.getvalue()

    def to_json(self, digits: int = 15) -> dict:
        return {
            "method": self.method,
            "normalization": self.normalization,
            "scale": str(self.scale),
            "sup_error": float(self.sup_error),
            "meta": {k: _jsonable(v, digits) for k, v in self.meta.items()},
            "rows": [
                {
                    "k": row.k,
                    "coord": float(row.coord),
                    "approx": float(row.approx),
                    "exact": float(row.exact),
                    "abs_err": float(row.abs_err),
                }
                for row in self.rows
            ],
        }


def _jsonable(v, digits):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (MP.mpf,)):
        return float(v)
    return v


def _coords(pmf: ExactPmf, center, scale: Fraction):
    root = MP.sqrt(mpf(scale))
    lo = 0
    hi = pmf.params.N - pmf.params.n_max
    for k in range(lo, hi + 1):
        yield k, (k - mpf(center)) / root, root * mpf(pmf[k])


def _require_sigma(derived):
    if derived.degenerate:
        raise DegenerateSigmaError("sigma^2 = 0: the expansion is undefined")


def default_coeffs(params: SchemeParams, variant: str = "fourier") -> EdgeworthCoeffs:
    derived = derive(params)
    _require_sigma(derived)
    return edgeworth_coeffs(g_signed_moments(derived), xi_moments(derived), variant=variant)


def approx_thm2(params: SchemeParams, pmf: Optional[ExactPmf] = None,
                coeffs: Optional[EdgeworthCoeffs] = None) -> ApproxReport:
    derived = derive(params)
    _require_sigma(derived)
    pmf = pmf or exact_pmf(params)
    coeffs = coeffs or default_coeffs(params)
    scale = params.N * derived.sigma2
    rows = [ApproxRow(k, x, w_hat(x, coeffs, params.N), ex)
            for k, x, ex in _coords(pmf, derived.mean_mu0, scale)]
    return ApproxReport("thm2", "nsigma", scale, rows,
                        {"M2": coeffs.M2, "M3": coeffs.M3, "M4": coeffs.M4, "variant": coeffs.variant})


def approx_gaussian(params: SchemeParams, pmf: Optional[ExactPmf] = None,
                    normalization: str = "nsigma") -> ApproxReport:
    """Bare normal density; ``normalization`` picks N sigma^2 or the exact variance."""
    derived = derive(params)
    pmf = pmf or exact_pmf(params)
    if normalization == "nsigma":
        _require_sigma(derived)
        center, scale = derived.mean_mu0, params.N * derived.sigma2
    elif normalization == "exact":
        center, scale = derived.mean_mu0, derived.var_mu0
        if scale == 0:
            raise DegenerateSigmaError("Var mu0 = 0")
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    rows = [ApproxRow(k, x, normal_density(x), ex) for k, x, ex in _coords(pmf, center, scale)]
    return ApproxReport("gaussian", normalization, scale, rows)


def approx_what_u(params: SchemeParams, pmf: Optional[ExactPmf] = None,
                  coeffs: Optional[EdgeworthCoeffs] = None) -> ApproxReport:
    """Density expansion at u_k with exact-variance scaling, no b_N term."""
    return approx_thm4(params, pmf, coeffs, sign=0)


def approx_thm3(decomp, pmf: ExactPmf) -> ApproxReport:
    mean, var = pmf_moments(pmf)[:2]
    L3, L4 = decomp.L3, decomp.L4
    rows = [ApproxRow(k, u, thm3_density(u, L3, L4), ex) for k, u, ex in _coords(pmf, mean, var)]
    return ApproxReport("thm3", "exact", var, rows, {"L3": L3, "L4": L4})


def approx_thm4(params: SchemeParams, pmf: Optional[ExactPmf] = None,
                coeffs: Optional[EdgeworthCoeffs] = None, sign=None) -> ApproxReport:
    """Density expansion at u_k plus ``sign * b_N * He_2(u) * phi(u)``.

    ``sign=None`` uses the calibrated sign. With the ``printed`` coefficient
    variant the correction is ``He_2(u) * N b_N / N`` without Gaussian weight.
    """
    derived = derive(params)
    _require_sigma(derived)
    pmf = pmf or exact_pmf(params)
    coeffs = coeffs or default_coeffs(params)
    if sign is None:
        sign = calibrated_thm4_sign(coeffs.variant)
    sign = Fraction(sign)
    b_N = derived.b_N
    rows = []
    for k, u, ex in _coords(pmf, derived.mean_mu0, derived.var_mu0):
        value = w_hat(u, coeffs, params.N)
        if sign:
            if coeffs.variant == "printed":
                value += mpf(sign) * 2 * mpf(b_N) * hermite(2, u)
            else:
                value += mpf(sign * b_N) * hermite(2, u) * normal_density(u)
        rows.append(ApproxRow(k, u, value, ex))
    method = "thm4" if sign else "what_u"
    return ApproxReport(method, "exact", derived.var_mu0, rows,
                        {"b_N": b_N, "b_N_tilde": params.N * b_N, "sign": sign, "variant": coeffs.variant})


def thm4_sign_errors(variant: str = "fourier", case=CALIBRATION_CASE) -> dict:
    N, p = case
    params = SchemeParams.from_proportions(N, [Fraction(x) for x in p])
    pmf = exact_pmf(params)
    coeffs = default_coeffs(params, variant)
    return {
        Fraction(sign): approx_thm4(params, pmf, coeffs, sign=sign).sup_error
        for sign in (Fraction(1, 2), Fraction(-1, 2))
    }


@lru_cache(maxsize=4)
def calibrated_thm4_sign(variant: str = "fourier") -> Fraction:
    """Sign in {+1/2, -1/2} minimizing the sup error on the calibration case."""
    errors = thm4_sign_errors(variant)
    return min(errors, key=errors.get)


def sup_error_slope(sweep: Sequence) -> float:
    """Least-squares slope of log(sup_error) against log(N)."""
    if len(sweep) < 3:
        raise ValueError("need at least 3 sweep points")
    Ns = np.array([float(N) for N, _ in sweep])
    errs = np.array([float(e) for _, e in sweep])
    if np.any(errs <= 0) or np.any(Ns <= 0):
        raise ValueError("sweep values must be positive")
    slope, _ = np.polyfit(np.log(Ns), np.log(errs), 1)
    return float(slope)


def approximate(method: str, params: SchemeParams, pmf: Optional[ExactPmf] = None,
                variant: str = "fourier", decomp=None) -> ApproxReport:
    pmf = pmf or exact_pmf(params)
    if method == "thm2":
        return approx_thm2(params, pmf, default_coeffs(params, variant))
    if method == "thm4":
        return approx_thm4(params, pmf, default_coeffs(params, variant))
    if method == "what_u":
        return approx_what_u(params, pmf, default_coeffs(params, variant))
    if method == "gaussian":
        return approx_gaussian(params, pmf)
    if method == "thm3":
        if decomp is None:
            from .decomp import extract_bernoulli, pgf_coefficients
            decomp = extract_bernoulli(pgf_coefficients(pmf))
        return approx_thm3(decomp, pmf)
    raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
