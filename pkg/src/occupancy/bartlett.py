"""Characteristic function of mu0 through the conditioning integral.

phi_N(t) = Theta_N(t) / Theta_N(0), where Theta_N integrates Psi^N over the box
|tau_l| <= pi sqrt(N p_l q_l) and Psi is the joint characteristic function of
the standardized kernel and the standardized Bernoulli indicators of one cell.
Theta_N is computed by tensor-product Gauss-Legendre quadrature with panel
doubling; the result is checked against the characteristic function of the
exact PMF.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateSigmaError, DimensionCapError, ToleranceNotReachedError
from .exact import exact_charfun, exact_pmf
from .precision import MP, mpf
from .scheme import DerivedParams, SchemeParams, derive

PSI_MAX_S = 20
THETA_MAX_S = 3


@dataclass(frozen=True)
class QuadratureSpec:
    panels: int = 4
    nodes: int = 16
    tol: float = 1e-10
    max_refinements: int = 6

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")
        if self.panels < 1 or self.nodes < 1:
            raise ValueError("need at least one panel and one node")


@dataclass(frozen=True)
class CellOutcomes:
    """All 2^s outcomes of one cell's indicators with their weights."""

    prob: np.ndarray
    g: np.ndarray
    xi: np.ndarray
    box: np.ndarray
    N: int


def cell_outcomes(derived: DerivedParams) -> CellOutcomes:
    s = derived.s
    if s > PSI_MAX_S:
        raise DimensionCapError(f"s={s} exceeds the 2^s enumeration cap {PSI_MAX_S}")
    if derived.degenerate:
        raise DegenerateSigmaError("sigma^2 = 0")
    Q = derived.Q_s
    sigma = float(derived.sigma2) ** 0.5
    p = [float(x) for x in derived.p]
    q = [float(x) for x in derived.q]
    prob, g, xi = [], [], []
    for u in itertools.product((0, 1), repeat=s):
        pr = 1.0
        for ul, pl, ql in zip(u, p, q):
            pr *= pl if ul else ql
        empty = 1.0 if not any(u) else 0.0
        value = empty - float(Q) + float(Q) * sum((ul - pl) / ql for ul, pl, ql in zip(u, p, q))
        prob.append(pr)
        g.append(value / sigma)
        xi.append([(ul - pl) / (pl * ql) ** 0.5 for ul, pl, ql in zip(u, p, q)])
    box = np.array([np.pi * (derived.N * pl * ql) ** 0.5 for pl, ql in zip(p, q)])
    return CellOutcomes(np.array(prob), np.array(g), np.array(xi), box, derived.N)


def _psi_grid(t: float, taus: np.ndarray, cells: CellOutcomes) -> np.ndarray:
    """Psi at each row of ``taus`` (shape (m, s))."""
    phase = (t * cells.g[:, None] + cells.xi @ taus.T) / np.sqrt(cells.N)
    return cells.prob @ np.exp(1j * phase)


def psi(t: float, tau: Sequence[float], derived: DerivedParams) -> complex:
    """E exp{i (t g~ + sum_l tau_l xi~_l) / sqrt(N)} by direct enumeration."""
    tau = np.asarray(tau, dtype=float).reshape(1, -1)
    if tau.shape[1] != derived.s:
        raise ValueError(f"tau must have length s={derived.s}")
    return complex(_psi_grid(float(t), tau, cell_outcomes(derived))[0])


def _gauss_legendre(half_width: float, panels: int, nodes: int):
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(-half_width, half_width, panels + 1)
    mids = (edges[:-1] + edges[1:]) / 2
    halves = (edges[1:] - edges[:-1]) / 2
    pts = (mids[:, None] + halves[:, None] * x[None, :]).ravel()
    wts = (halves[:, None] * w[None, :]).ravel()
    return pts, wts


def _theta_once(t: float, cells: CellOutcomes, panels: int, nodes: int) -> complex:
    rules = [_gauss_legendre(hw, panels, nodes) for hw in cells.box]
    first_pts, first_wts = rules[0]
    rest = rules[1:]
    if rest:
        rest_pts = np.array(list(itertools.product(*(r[0] for r in rest))))
        rest_wts = np.prod(np.array(list(itertools.product(*(r[1] for r in rest)))), axis=1)
    else:
        rest_pts = np.zeros((1, 0))
        rest_wts = np.ones(1)
    total = 0j
    # one slab per node of the first axis keeps memory at O(nodes^(s-1))
    for x0, w0 in zip(first_pts, first_wts):
        taus = np.column_stack([np.full(len(rest_pts), x0), rest_pts])
        vals = _psi_grid(t, taus, cells) ** cells.N
        total += w0 * np.dot(rest_wts, vals)
    return complex(total)


def theta(t: float, derived: DerivedParams, quad: Optional[QuadratureSpec] = None) -> complex:
    """Integral of Psi^N(t, .) over the box, refined until two levels agree to ``quad.tol``."""
    quad = quad or QuadratureSpec()
    if derived.s > THETA_MAX_S:
        raise DimensionCapError(f"quadrature limited to s <= {THETA_MAX_S}, got s={derived.s}")
    cells = cell_outcomes(derived)
    panels = quad.panels
    prev = _theta_once(t, cells, panels, quad.nodes)
    diff = float("inf")
    for _ in range(quad.max_refinements):
        panels *= 2
        cur = _theta_once(t, cells, panels, quad.nodes)
        diff = abs(cur - prev)
        if diff < quad.tol:
            return cur
        prev = cur
    raise ToleranceNotReachedError(
        f"quadrature change {diff:.3g} still above tol {quad.tol:g} at {panels} panels",
        estimate=prev,
        achieved=diff,
    )


def phi_via_bartlett(t: float, params: SchemeParams, quad: Optional[QuadratureSpec] = None) -> complex:
    """E exp{i t (mu0 - N Q_s) / (sigma sqrt(N))} as Theta_N(t) / Theta_N(0)."""
    derived = derive(params)
    if derived.degenerate:
        raise DegenerateSigmaError("sigma^2 = 0")
    if derived.s > THETA_MAX_S:
        raise DimensionCapError(f"quadrature limited to s <= {THETA_MAX_S}, got s={derived.s}")
    if t == 0:
        return 1 + 0j
    return theta(t, derived, quad) / theta(0.0, derived, quad)


def verify(params: SchemeParams, ts: Sequence[float], quad: Optional[QuadratureSpec] = None) -> list:
    """Rows comparing the quadrature route with the exact PMF's characteristic function."""
    derived = derive(params)
    if derived.degenerate:
        raise DegenerateSigmaError("sigma^2 = 0")
    if derived.s > THETA_MAX_S:
        raise DimensionCapError(f"quadrature limited to s <= {THETA_MAX_S}, got s={derived.s}")
    pmf = exact_pmf(params)
    scale = MP.sqrt(mpf(params.N * derived.sigma2))
    theta0 = theta(0.0, derived, quad)
    rows = []
    for t in ts:
        via = theta(float(t), derived, quad) / theta0 if t else 1 + 0j
        ex = complex(exact_charfun(pmf, t, derived.mean_mu0, scale))
        rows.append({
            "t": float(t),
            "bartlett_re": via.real,
            "bartlett_im": via.imag,
            "exact_re": ex.real,
            "exact_im": ex.imag,
            "abs_diff": abs(via - ex),
        })
    return rows
