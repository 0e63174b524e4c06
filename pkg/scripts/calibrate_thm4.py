"""Pick the sign of the b_N correction by comparing both against the exact PMF.

Also shows how the choice holds up away from the calibration point.
"""
from fractions import Fraction

from occupancy.edgeworth import approx_thm4, approx_what_u, calibrated_thm4_sign, default_coeffs, thm4_sign_errors
from occupancy.exact import exact_pmf
from occupancy.scheme import SchemeParams

CHECKS = [
    (160, ("3/10", "1/2")),
    (80, ("3/10", "1/2")),
    (100, ("1/5", "2/5")),
    (120, ("1/4", "1/3", "1/2")),
]


def main():
    for variant in ("fourier", "printed"):
        errors = thm4_sign_errors(variant)
        print(f"{variant}: calibration sup errors " +
              ", ".join(f"sign {s}: {float(e):.3e}" for s, e in sorted(errors.items())) +
              f" -> chosen {calibrated_thm4_sign(variant)}")
    print()
    print("N,p,plus_half,minus_half,uncorrected")
    for N, p in CHECKS:
        params = SchemeParams.from_proportions(N, [Fraction(x) for x in p])
        pmf = exact_pmf(params)
        coeffs = default_coeffs(params)
        cols = [approx_thm4(params, pmf, coeffs, sign=s).sup_error for s in (Fraction(1, 2), Fraction(-1, 2))]
        cols.append(approx_what_u(params, pmf, coeffs).sup_error)
        print(f"{N},{';'.join(p)}," + ",".join(f"{float(c):.3e}" for c in cols))


if __name__ == "__main__":
    main()
