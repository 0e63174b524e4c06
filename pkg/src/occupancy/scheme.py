"""Scheme parameters and the closed-form scalars derived from them.

Everything here is exact: probabilities are ``fractions.Fraction`` built from
the integer inputs, and floating point only appears in :func:`diagnostics`,
whose quantities involve square roots.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Optional, Sequence

from .errors import DegenerateSigmaError, ParameterDomainError
from .precision import MP, mpf


@dataclass(frozen=True)
class SchemeParams:
    """``N`` cells and ``s = len(n)`` sets; set ``l`` occupies ``n[l]`` distinct cells."""

    N: int
    n: tuple

    def __post_init__(self):
        n = tuple(self.n)
        object.__setattr__(self, "n", n)
        if isinstance(self.N, bool) or not isinstance(self.N, int):
            raise ParameterDomainError(f"N must be an integer, got {self.N!r}")
        if self.N < 2:
            raise ParameterDomainError(f"N must be >= 2, got {self.N}")
        if len(n) < 1:
            raise ParameterDomainError("need at least one set")
        for size in n:
            if isinstance(size, bool) or not isinstance(size, int):
                raise ParameterDomainError(f"set sizes must be integers, got {size!r}")
            if not 1 <= size <= self.N - 1:
                raise ParameterDomainError(
                    f"set size {size} outside [1, N-1] = [1, {self.N - 1}]"
                )

    @property
    def s(self) -> int:
        return len(self.n)

    @property
    def n_max(self) -> int:
        return max(self.n)

    @property
    def support(self) -> tuple:
        """Inclusive range of possible empty-cell counts."""
        return max(0, self.N - sum(self.n)), self.N - self.n_max

    @classmethod
    def from_proportions(cls, N: int, p: Sequence) -> "SchemeParams":
        """Set sizes ``n_l = p_l * N``; each product must be an integer."""
        sizes = []
        for pl in p:
            frac = Fraction(str(pl)) if isinstance(pl, float) else Fraction(pl)
            size = frac * N
            if size.denominator != 1:
                raise ParameterDomainError(f"p={pl} times N={N} is not an integer")
            sizes.append(int(size))
        return cls(N, tuple(sizes))


def elementary_symmetric(values: Sequence[Fraction]) -> list:
    """Coefficients e_0..e_s of prod(1 + x * v) in ascending powers of x."""
    e = [Fraction(1)]
    for v in values:
        e = [a + b * v for a, b in zip(e + [Fraction(0)], [Fraction(0)] + e)]
    return e


@dataclass(frozen=True)
class DerivedParams:
    params: SchemeParams
    p: tuple
    q: tuple
    r: tuple
    Q_s: Fraction
    P_s: Fraction
    n_max: int
    mean_mu0: Fraction
    sigma2: Fraction
    alpha: Fraction
    var_mu0: Fraction
    elem_sym: tuple
    _b_N: Optional[Fraction] = None

    @property
    def N(self) -> int:
        return self.params.N

    @property
    def s(self) -> int:
        return self.params.s

    @property
    def degenerate(self) -> bool:
        return self.sigma2 == 0

    @property
    def b_N(self) -> Fraction:
        """Relative correction with var_mu0 = N * sigma2 * (1 + b_N)."""
        if self._b_N is None:
            raise DegenerateSigmaError("b_N undefined: sigma^2 = 0")
        return self._b_N


def derive(params: SchemeParams) -> DerivedParams:
    N = params.N
    p = tuple(Fraction(nl, N) for nl in params.n)
    q = tuple(1 - pl for pl in p)
    r = tuple(pl / ql for pl, ql in zip(p, q))
    Q_s = prod(q, start=Fraction(1))
    P_s = prod(p, start=Fraction(1))
    sigma2 = Q_s * (1 - Q_s * (1 + sum(r)))
    e = elementary_symmetric(r)

    # unordered subsets: sum over nu >= 2 of (-1)^nu e_nu / (N-1)^(nu-1)
    tail = sum(
        (Fraction((-1) ** nu) * e[nu] / Fraction(N - 1) ** (nu - 1) for nu in range(2, len(e))),
        Fraction(0),
    )
    var_mu0 = N * sigma2 + N * Q_s**2 * tail
    b_N = None if sigma2 == 0 else Q_s**2 * tail / sigma2

    alpha = max(min(Q_s**2 * pl / ql, P_s**2 * ql / pl) for pl, ql in zip(p, q))

    return DerivedParams(
        params=params,
        p=p,
        q=q,
        r=r,
        Q_s=Q_s,
        P_s=P_s,
        n_max=params.n_max,
        mean_mu0=N * Q_s,
        sigma2=sigma2,
        alpha=alpha,
        var_mu0=var_mu0,
        elem_sym=tuple(e),
        _b_N=b_N,
    )


@dataclass(frozen=True)
class Diagnostics:
    T_N: object
    L_N: object
    ratio_325: object
    sigma_Eg3: object


def diagnostics(derived: DerivedParams, gmom) -> Diagnostics:
    """Quantities entering the side conditions of the local approximations.

    They carry unspecified absolute constants, so they are reported, never
    compared against anything.
    """
    if derived.degenerate:
        raise DegenerateSigmaError("diagnostics need sigma^2 > 0")
    N = derived.N
    abs1, abs3, abs5 = gmom.abs_g1, gmom.abs_g3, gmom.abs_g5
    if abs3 is None or abs5 is None or abs1 is None:
        raise ValueError("absolute moments missing; compute them with g_abs_moments")
    sqrt_pq = [MP.sqrt(mpf(pl * ql)) for pl, ql in zip(derived.p, derived.q)]
    T_N = MP.sqrt(N) * min([1 / mpf(abs3)] + sqrt_pq)
    xi5 = sum(
        (mpf(pl**4 + ql**4) / MP.sqrt(mpf(pl * ql)) ** 3 for pl, ql in zip(derived.p, derived.q)),
        MP.mpf(0),
    )
    L_N = (mpf(abs5) + xi5) / MP.mpf(N) ** 1.5
    min_pq = min(pl * ql for pl, ql in zip(derived.p, derived.q))
    ratio = mpf(abs1) / mpf(abs3) / mpf(min_pq)
    sigma_Eg3 = MP.sqrt(mpf(derived.sigma2)) * mpf(abs3)
    return Diagnostics(T_N=T_N, L_N=L_N, ratio_325=ratio, sigma_Eg3=sigma_Eg3)
