"""Exact distribution and local Edgeworth expansions for the number of empty
cells when particles are allocated to cells in sets."""

__version__ = "0.1.0"

from .scheme import SchemeParams, DerivedParams, derive, diagnostics
from .exact import ExactPmf, exact_pmf, enumerate_pmf, pmf_moments, exact_charfun
from .moments import (
    EdgeworthCoeffs,
    GMoments,
    XiMoments,
    edgeworth_coeffs,
    g_abs_moments,
    g_moments,
    g_signed_moments,
    w_charfun,
    xi_moments,
)
from .edgeworth import (
    ApproxReport,
    approx_gaussian,
    approx_thm2,
    approx_thm3,
    approx_thm4,
    hermite,
    sup_error_slope,
    w_hat,
)
from .decomp import BernoulliDecomposition, extract_bernoulli, l3_l4, pgf_coefficients, reconstruct_pmf
