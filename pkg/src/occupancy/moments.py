"""Moments of the standardized cell kernel and the expansion coefficients.

The kernel of a single cell is

    g(u) = 1{u_1 + ... + u_s = 0} - Q_s + Q_s * sum_l (u_l - p_l) / q_l

with independent u_l ~ Bernoulli(p_l). Writing L = sum_l u_l / q_l it becomes
``g = I + c + Q_s * L`` with ``c = -Q_s (1 + sum r_l)`` and ``I = 1{L = 0}``.
Since ``I * L == 0`` every moment splits into a moment of the affine variable
``c + Q_s * L`` (a constant plus independent scaled Bernoullis) and a
correction at the single atom ``L = 0``, which has probability Q_s. That
keeps all signed moments exact and O(s^2).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Optional

import numpy as np

from .errors import DegenerateSigmaError
from .precision import MP, mpf
from .scheme import DerivedParams

ABS_ENUMERATION_MAX_S = 20


@dataclass(frozen=True)
class XiMoments:
    """Moments of (u_l - p_l) / sqrt(p_l q_l) for each set."""

    third: tuple
    fourth: tuple
    abs_fifth: tuple


@dataclass(frozen=True)
class RawGMoments:
    """Exact moments of the un-standardized kernel g.

    ``cross[(a, b)][l]`` holds E g^a (u_l - p_l)^b and ``pair[l][m]`` holds
    E g (u_l - p_l)(u_m - p_m) for l != m (zero on the diagonal).
    """

    g: tuple
    cross: dict
    pair: tuple = ()


@dataclass(frozen=True)
class GMoments:
    raw: RawGMoments
    sigma: object
    g2: object
    g3: object
    g4: object
    g2xi: tuple
    g2xi2: tuple
    gxixi: tuple = ()
    abs_raw: Optional[tuple] = None
    abs_g1: object = None
    abs_g3: object = None
    abs_g5: object = None
    abs_stderr: Optional[tuple] = None

    def with_abs(self, other: "GMoments") -> "GMoments":
        return GMoments(
            raw=self.raw,
            sigma=self.sigma,
            g2=self.g2,
            g3=self.g3,
            g4=self.g4,
            g2xi=self.g2xi,
            g2xi2=self.g2xi2,
            gxixi=self.gxixi,
            abs_raw=other.abs_raw,
            abs_g1=other.abs_g1,
            abs_g3=other.abs_g3,
            abs_g5=other.abs_g5,
            abs_stderr=other.abs_stderr,
        )


@dataclass(frozen=True)
class EdgeworthCoeffs:
    M2: object
    M3: object
    M4: object
    variant: str = "fourier"


def xi_moments(derived: DerivedParams) -> XiMoments:
    third, fourth, fifth = [], [], []
    for p, q in zip(derived.p, derived.q):
        pq = p * q
        root = MP.sqrt(mpf(pq))
        third.append(mpf(q - p) / root)
        fourth.append((1 - 3 * pq) / pq)
        fifth.append(mpf(p**4 + q**4) / root**3)
    return XiMoments(tuple(third), tuple(fourth), tuple(fifth))


def _add_independent(moments: list, scale: Fraction, p: Fraction) -> list:
    """Raw moments of S + scale * Bernoulli(p) from those of S (orders 0..4)."""
    x = [Fraction(1)] + [scale**i * p for i in range(1, len(moments))]
    return [
        sum((comb(j, i) * moments[i] * x[j - i] for i in range(j + 1)), Fraction(0))
        for j in range(len(moments))
    ]


def _affine_moments(const: Fraction, scales, probs, order: int = 4) -> list:
    m = [const**j for j in range(order + 1)]
    for a, p in zip(scales, probs):
        m = _add_independent(m, a, p)
    return m


def raw_g_moments(derived: DerivedParams) -> RawGMoments:
    Q = derived.Q_s
    p, q = derived.p, derived.q
    s = derived.s
    c = -Q * (1 + sum(derived.r))
    weights = [Q / ql for ql in q]

    y = _affine_moments(c, weights, p)
    g = tuple(Q * (1 + c) ** j + y[j] - Q * c**j for j in range(5))

    cross = {(a, b): [] for a in (1, 2) for b in (1, 2)}
    for l in range(s):
        others_w = weights[:l] + weights[l + 1:]
        others_p = p[:l] + p[l + 1:]
        y_rest = _affine_moments(c, others_w, others_p, order=2)
        y_hit = _affine_moments(c + weights[l], others_w, others_p, order=2)
        for a in (1, 2):
            for b in (1, 2):
                affine = p[l] * q[l] ** b * y_hit[a] + q[l] * (-p[l]) ** b * y_rest[a]
                atom = Q * ((1 + c) ** a - c**a) * (-p[l]) ** b
                cross[(a, b)].append(affine + atom)
    # L is linear in u, so only the atom contributes: E I (u_l - p_l)(u_m - p_m) = Q p_l p_m
    pair = tuple(
        tuple(Fraction(0) if l == m else Q * p[l] * p[m] for m in range(s)) for l in range(s)
    )
    return RawGMoments(g=g, cross={k: tuple(v) for k, v in cross.items()}, pair=pair)


def g_signed_moments(derived: DerivedParams) -> GMoments:
    if derived.degenerate:
        raise DegenerateSigmaError("standardized kernel moments need sigma^2 > 0")
    raw = raw_g_moments(derived)
    sigma2 = derived.sigma2
    sigma = MP.sqrt(mpf(sigma2))
    pq = [pl * ql for pl, ql in zip(derived.p, derived.q)]
    g2xi = tuple(mpf(raw.cross[(2, 1)][l]) / (mpf(sigma2) * MP.sqrt(mpf(pq[l]))) for l in range(derived.s))
    g2xi2 = tuple(raw.cross[(2, 2)][l] / (sigma2 * pq[l]) for l in range(derived.s))
    gxixi = tuple(
        tuple(mpf(raw.pair[l][m]) / (sigma * MP.sqrt(mpf(pq[l] * pq[m]))) for m in range(derived.s))
        for l in range(derived.s)
    )
    return GMoments(
        raw=raw,
        sigma=sigma,
        gxixi=gxixi,
        g2=raw.g[2] / sigma2,
        g3=mpf(raw.g[3]) / sigma**3,
        g4=raw.g[4] / sigma2**2,
        g2xi=g2xi,
        g2xi2=g2xi2,
    )


def l_distribution(derived: DerivedParams) -> dict:
    """Exact law of L = sum_l u_l / q_l as {value: probability}."""
    dist = {Fraction(0): Fraction(1)}
    for p, q in zip(derived.p, derived.q):
        w = 1 / q
        nxt: dict = {}
        for v, pr in dist.items():
            nxt[v] = nxt.get(v, 0) + pr * q
            nxt[v + w] = nxt.get(v + w, 0) + pr * p
        dist = nxt
    return dist


def g_abs_moments(derived: DerivedParams, *, max_s: int = ABS_ENUMERATION_MAX_S,
                  mc_samples: int = 200_000, seed: int = 0) -> GMoments:
    """E|g~|, E|g~|^3 and E|g~|^5.

    Exact for s <= max_s; beyond that a Monte Carlo estimate with standard
    errors in ``abs_stderr`` (these only feed diagnostics).
    """
    if derived.degenerate:
        raise DegenerateSigmaError("standardized kernel moments need sigma^2 > 0")
    Q = derived.Q_s
    c = -Q * (1 + sum(derived.r))
    sigma = MP.sqrt(mpf(derived.sigma2))
    orders = (1, 3, 5)
    if derived.s <= max_s:
        acc = [Fraction(0)] * 3
        for v, pr in l_distribution(derived).items():
            g = 1 + c if v == 0 else c + Q * v
            for i, j in enumerate(orders):
                acc[i] += pr * abs(g) ** j
        std = [mpf(a) / sigma**j for a, j in zip(acc, orders)]
        return GMoments(raw=None, sigma=sigma, g2=None, g3=None, g4=None, g2xi=(), g2xi2=(),
                        abs_raw=tuple(acc), abs_g1=std[0], abs_g3=std[1], abs_g5=std[2])

    rng = np.random.default_rng(seed)
    p = np.array([float(x) for x in derived.p])
    w = np.array([float(1 / x) for x in derived.q])
    u = rng.random((mc_samples, derived.s)) < p
    L = u.astype(float) @ w
    g = np.where(u.any(axis=1), float(c) + float(Q) * L, 1.0 + float(c)) / float(sigma)
    est, err = [], []
    for j in orders:
        vals = np.abs(g) ** j
        est.append(MP.mpf(float(vals.mean())))
        err.append(float(vals.std(ddof=1) / np.sqrt(mc_samples)))
    return GMoments(raw=None, sigma=sigma, g2=None, g3=None, g4=None, g2xi=(), g2xi2=(),
                    abs_g1=est[0], abs_g3=est[1], abs_g5=est[2], abs_stderr=tuple(err))


def g_moments(derived: DerivedParams, *, with_abs: bool = True) -> GMoments:
    signed = g_signed_moments(derived)
    if not with_abs:
        return signed
    return signed.with_abs(g_abs_moments(derived))


def edgeworth_coeffs(gmom: GMoments, xim: XiMoments, *, variant: str = "fourier") -> EdgeworthCoeffs:
    """Assemble M2, M3, M4.

    ``variant="fourier"`` is the full second-order term of the expansion: M2
    includes sum_{l != m} (E g~ xi~_l xi~_m)^2, which comes from the square of
    the first-order polynomial, and M4 subtracts 3 once. ``"printed"`` omits
    the pair term from M2 and subtracts 3s in M4.

    The per-set part of M2 vanishes identically, because
    (u - p)^2 = (q - p)(u - p) + pq gives E g~^2 xi~^2 = E xi~^3 E g~^2 xi~ + 1.
    """
    s = len(gmom.g2xi)
    per_set = sum(
        (gmom.g2xi[l] * xim.third[l] - mpf(gmom.g2xi2[l]) + 1 for l in range(s)),
        MP.mpf(0),
    )
    pairs = sum((gmom.gxixi[l][m] ** 2 for l in range(s) for m in range(s) if l != m), MP.mpf(0))
    M3 = gmom.g3
    sq = sum((x**2 for x in gmom.g2xi), MP.mpf(0))
    if variant == "fourier":
        M2 = per_set + pairs
        M4 = mpf(gmom.g4) - 3 * (sq + 1)
    elif variant == "printed":
        M2 = per_set
        M4 = mpf(gmom.g4) - 3 * (sq + s)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return EdgeworthCoeffs(M2=M2, M3=M3, M4=M4, variant=variant)


def w_charfun(t, coeffs: EdgeworthCoeffs, N: int):
    """Second-order expansion W_N(t) of the standardized characteristic function."""
    t = mpf(t)
    it = MP.mpc(0, t)
    first = it**3 * coeffs.M3 / 6
    second = it**6 * coeffs.M3**2 / 72 + it**4 * coeffs.M4 / 24 + it**2 * coeffs.M2 / 4
    return MP.exp(-t**2 / 2) * (1 + first / MP.sqrt(N) + second / N)
