"""Exact distribution of the empty-cell count.

Two independent routes: inclusion-exclusion over the cells left empty
(:func:`exact_pmf`) and brute force over every joint allocation
(:func:`enumerate_pmf`). Both return rationals and must agree exactly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, prod
from typing import Dict

from .errors import ResourceCapError
from .precision import MP, mpf
from .scheme import SchemeParams

EXACT_N_CAP = 500
ENUMERATION_CAP = 10**7


@dataclass(frozen=True)
class ExactPmf:
    params: SchemeParams
    support_min: int
    support_max: int
    probs: Dict[int, Fraction]

    def __getitem__(self, k: int) -> Fraction:
        return self.probs.get(k, Fraction(0))

    def items(self):
        return sorted(self.probs.items())

    def to_json(self) -> list:
        return [{"k": k, "p": str(p)} for k, p in self.items()]

    def to_csv(self, digits: int = 15) -> str:
        lines = ["k,p_exact,p_decimal"]
        for k, p in self.items():
            lines.append(f"{k},{p},{MP.nstr(mpf(p), digits)}")
        return "\n".join(lines) + "\n"


@lru_cache(maxsize=64)
def _binomial_row(N: int) -> tuple:
    return tuple(comb(N, k) for k in range(N + 1))


def _binom(a: int, b: int) -> int:
    if b < 0 or a < b:
        return 0
    return comb(a, b)


def _all_empty_weight(params: SchemeParams, m: int) -> int:
    """prod_l C(N - m, n_l): number of joint allocations avoiding m given cells."""
    return prod(_binom(params.N - m, nl) for nl in params.n)


def exact_pmf(params: SchemeParams, *, n_cap: int = EXACT_N_CAP) -> ExactPmf:
    """P{mu0 = k} = C(N,k) sum_j (-1)^j C(N-k,j) prod_l C(N-k-j,n_l)/C(N,n_l)."""
    N = params.N
    if N > n_cap:
        raise ResourceCapError(f"N={N} exceeds the exact-computation cap {n_cap}")
    lo, hi = params.support
    total = prod(comb(N, nl) for nl in params.n)
    row = _binomial_row(N)
    # weights[m] depends only on the number of forced-empty cells
    weights = [_all_empty_weight(params, m) for m in range(N + 1)]
    probs = {}
    for k in range(lo, hi + 1):
        free = N - k
        acc = 0
        for j in range(free + 1):
            w = weights[k + j]
            if w == 0:
                break
            term = comb(free, j) * w
            acc += -term if j & 1 else term
        probs[k] = Fraction(row[k] * acc, total)
    return ExactPmf(params, lo, hi, probs)


def enumerate_pmf(params: SchemeParams, *, cap: int = ENUMERATION_CAP) -> ExactPmf:
    """Brute force over all prod_l C(N, n_l) equally likely joint allocations."""
    N = params.N
    total = prod(comb(N, nl) for nl in params.n)
    if total > cap:
        raise ResourceCapError(f"{total} joint allocations exceed the enumeration cap {cap}")
    full = (1 << N) - 1
    # occupied-cell bitmask distribution, merged set by set
    masks = {0: 1}
    for nl in params.n:
        subsets = [sum(1 << c for c in cells) for cells in itertools.combinations(range(N), nl)]
        merged: Dict[int, int] = {}
        for mask, count in masks.items():
            for sub in subsets:
                key = mask | sub
                merged[key] = merged.get(key, 0) + count
        masks = merged
    counts: Dict[int, int] = {}
    for mask, count in masks.items():
        k = bin(full & ~mask).count("1")
        counts[k] = counts.get(k, 0) + count
    lo, hi = params.support
    probs = {k: Fraction(counts.get(k, 0), total) for k in range(lo, hi + 1)}
    return ExactPmf(params, lo, hi, probs)


def pmf_moments(pmf: ExactPmf):
    """Mean and the 2nd, 3rd, 4th central moments, all exact."""
    mean = sum((k * p for k, p in pmf.items()), Fraction(0))
    central = [sum(((k - mean) ** j * p for k, p in pmf.items()), Fraction(0)) for j in (2, 3, 4)]
    return (mean, *central)


def exact_charfun(pmf: ExactPmf, t, center, scale):
    """E exp(i t (mu0 - center) / scale), evaluated in the package context."""
    scale = mpf(scale)
    if scale <= 0:
        raise ValueError("scale must be positive")
    t = mpf(t)
    center = mpf(center)
    acc = MP.mpc(0)
    for k, p in pmf.items():
        acc += mpf(p) * MP.expj(t * (k - center) / scale)
    return acc
