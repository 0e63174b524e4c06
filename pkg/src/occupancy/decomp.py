"""Factor the PGF of mu0 into Bernoulli factors.

F(z) = E z^mu0 has only real non-positive roots -d_m, so
F(z) = prod_m (z + d_m) / (1 + d_m) and mu0 is distributed as a sum of
independent Bernoulli(a_m) with a_m = 1 / (1 + d_m).

Roots are found without floating point. After peeling the z = 0 roots, the
polynomial h(y) = F(-y) has only positive roots; it is scaled into (0, 1) and
intervals are split in half until each holds a single root. Root counts come
from Descartes' rule of signs on the Moebius image of each interval, which is
exact for real-rooted polynomials. Isolated roots are then refined by
bisection on exact signs of the original integer polynomial.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import List

from .errors import DegenerateVarianceError, ResourceCapError, RootValidationError
from .exact import ExactPmf
from .precision import MP, mpf

DEGREE_CAP = 64
REFINE_BITS = 100
CLUSTER_BITS = 80
RECONSTRUCTION_TOL = 1e-9


@dataclass(frozen=True)
class BernoulliDecomposition:
    degree: int
    roots: tuple
    a: tuple
    L3: object
    L4: object
    zero_roots: int = 0

    def to_json(self, digits: int = 20) -> dict:
        return {
            "roots": [MP.nstr(r, digits) for r in self.roots],
            "a": [MP.nstr(x, digits) for x in self.a],
            "L3": None if self.L3 is None else MP.nstr(self.L3, digits),
            "L4": None if self.L4 is None else MP.nstr(self.L4, digits),
        }


def pgf_coefficients(pmf: ExactPmf) -> List[Fraction]:
    """Coefficients of E z^mu0 in ascending powers."""
    return [pmf[k] for k in range(pmf.support_max + 1)]


# -- integer polynomial helpers (ascending coefficient lists) -----------------

def _sign_variations(coeffs) -> int:
    signs = [c > 0 for c in coeffs if c != 0]
    return sum(1 for x, y in zip(signs, signs[1:]) if x != y)


def _taylor_shift_one(coeffs) -> list:
    """Coefficients of P(x + 1)."""
    c = list(coeffs)
    n = len(c)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            c[j] += c[j + 1]
    return c


def _roots_in_unit_interval(coeffs) -> int:
    """Number of roots of P in (0, 1), assuming P is real-rooted."""
    return _sign_variations(_taylor_shift_one(coeffs[::-1]))


def _halve(coeffs) -> list:
    """2^d P(x / 2)."""
    d = len(coeffs) - 1
    return [c << (d - i) for i, c in enumerate(coeffs)]


def _eval_dyadic(coeffs, m: int, k: int) -> int:
    """2^(k d) P(m / 2^k), exact."""
    d = len(coeffs) - 1
    acc = 0
    for i in range(d, -1, -1):
        acc = acc * m + (coeffs[i] << (k * (d - i)))
    return acc


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def _isolate(poly) -> list:
    """Isolating intervals for the roots of ``poly`` in (0, 1).

    Returns tuples (m, k, width_units, multiplicity): the root lies in
    (m / 2^k, (m + width_units) / 2^k), or equals m / 2^k when width_units == 0.
    """
    found = []
    stack = [(poly, 0, 0)]  # P mapped onto the unit interval, offset m, level k
    while stack:
        local, m, k = stack.pop()
        count = _roots_in_unit_interval(local)
        if count == 0:
            continue
        if count == 1:
            found.append((m, k, 1, 1))
            continue
        if m.bit_length() > CLUSTER_BITS:
            # relative width below 2^-CLUSTER_BITS and still several roots
            found.append((m, k, 1, count))
            continue
        left = _halve(local)
        right = _taylor_shift_one(left)
        if right[0] == 0:
            # exact root at the midpoint; it belongs to neither open half
            mult = 0
            while right[0] == 0:
                right = right[1:]
                mult += 1
            found.append((2 * m + 1, k + 1, 0, mult))
        stack.append((left, 2 * m, k + 1))
        stack.append((right, 2 * m + 1, k + 1))
    return found


def _refine(poly, m: int, k: int, bits: int):
    """Bisect (m/2^k, (m+1)/2^k) to relative width 2^-bits around its simple root."""
    lo, hi = m, m + 1
    s_lo = _sign(_eval_dyadic(poly, lo, k))
    s_hi = _sign(_eval_dyadic(poly, hi, k))
    if s_lo == 0 and s_hi == 0:
        raise RootValidationError("both ends of an isolating interval are roots")
    # an endpoint may itself be a (separately recorded) root; the sign just
    # inside it is then the opposite of the other end's
    if s_lo == 0:
        s_lo = -s_hi
    while lo == 0 or (hi - lo) << bits > lo:
        lo, hi, k = 2 * lo, 2 * hi, k + 1
        mid = lo + 1
        s_mid = _sign(_eval_dyadic(poly, mid, k))
        if s_mid == 0:
            return Fraction(mid, 1 << k)
        if s_mid == s_lo:
            lo = mid
        else:
            hi = mid
    return Fraction(2 * lo + 1, 1 << (k + 1))


def _root_bound_exponent(coeffs) -> int:
    """e with every root below 2^e (Fujiwara bound from bit lengths)."""
    d = len(coeffs) - 1
    lead = abs(coeffs[-1]).bit_length() - 1
    worst = 0
    for i in range(1, d + 1):
        c = coeffs[d - i]
        if c:
            excess = abs(c).bit_length() - lead
            worst = max(worst, -(-excess // i))
    return worst + 2


def positive_roots(coeffs: List[int], *, bits: int = REFINE_BITS) -> list:
    """Roots of a real-rooted integer polynomial with all roots > 0.

    Returns (root, multiplicity) pairs with exact dyadic root approximations.
    """
    d = len(coeffs) - 1
    if d == 0:
        return []
    e = _root_bound_exponent(coeffs)
    scaled = [c << (e * i) for i, c in enumerate(coeffs)]  # P(2^e x), roots in (0, 1)
    out = []
    for m, k, width, mult in _isolate(scaled):
        if width == 0:
            x = Fraction(m, 1 << k)
        elif mult == 1:
            x = _refine(scaled, m, k, bits)
        else:
            x = Fraction(2 * m + 1, 1 << (k + 1))
        out.append((x * (1 << e), mult))
    return sorted(out)


def extract_bernoulli(pgf: List[Fraction], *, degree_cap: int = DEGREE_CAP,
                      bits: int = REFINE_BITS, tol: float = RECONSTRUCTION_TOL) -> BernoulliDecomposition:
    coeffs = list(pgf)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    degree = len(coeffs) - 1
    if degree < 1:
        raise ValueError("PGF must have degree >= 1")
    if coeffs[-1] <= 0:
        raise ValueError("leading coefficient must be positive")
    if degree > degree_cap:
        raise ResourceCapError(f"PGF degree {degree} exceeds cap {degree_cap}")

    zeros = 0
    while coeffs[zeros] == 0:
        zeros += 1
    rest = coeffs[zeros:]
    scale = lcm(*(c.denominator for c in rest))
    # h(y) = F(-y) / y^zeros has only positive roots
    h = [int(c * scale) * (-1) ** i for i, c in enumerate(rest)]
    if h[-1] < 0:
        h = [-c for c in h]

    d_values = [MP.mpf(0)] * zeros
    for root, mult in positive_roots(h, bits=bits):
        d_values.extend([mpf(root)] * mult)
    if len(d_values) != degree:
        raise RootValidationError(
            f"found {len(d_values)} real roots for a degree-{degree} PGF"
        )
    d_values.sort(reverse=True)
    roots = tuple(-x for x in d_values)
    a = tuple(1 / (1 + x) for x in d_values)

    recon = reconstruct_pmf_from_a(a)
    worst = max(abs(recon.get(k, 0) - mpf(c)) for k, c in enumerate(coeffs))
    if worst > tol:
        raise RootValidationError(f"reconstructed PMF off by {MP.nstr(worst, 5)} > {tol}")

    try:
        L3, L4 = l3_l4_from_a(a)
    except DegenerateVarianceError:
        L3 = L4 = None
    return BernoulliDecomposition(degree=degree, roots=roots, a=a, L3=L3, L4=L4, zero_roots=zeros)


def l3_l4_from_a(a):
    v = sum((x * (1 - x) for x in a), MP.mpf(0))
    if v == 0:
        raise DegenerateVarianceError("sum a(1 - a) = 0: every Bernoulli factor is degenerate")
    third = sum((x * (1 - x) * (1 - 2 * x) for x in a), MP.mpf(0))
    fourth = sum((x * (1 - x) * (1 - 6 * x * (1 - x)) for x in a), MP.mpf(0))
    return third / v**1.5, fourth / v**2


def l3_l4(decomp: BernoulliDecomposition):
    """Standardized third and fourth cumulants of the Bernoulli sum."""
    return l3_l4_from_a(decomp.a)


def reconstruct_pmf_from_a(a) -> dict:
    dist = [MP.mpf(1)]
    for x in a:
        x = mpf(x)
        nxt = [MP.mpf(0)] * (len(dist) + 1)
        for k, pr in enumerate(dist):
            nxt[k] += pr * (1 - x)
            nxt[k + 1] += pr * x
        dist = nxt
    return dict(enumerate(dist))


def reconstruct_pmf(decomp: BernoulliDecomposition) -> dict:
    """Poisson-binomial PMF of the factors, {k: probability}."""
    return reconstruct_pmf_from_a(decomp.a)
