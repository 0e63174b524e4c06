"""Sup-error sweeps over N for every approximant, at fixed set proportions.

    python3 scripts/convergence_sweep.py --p 0.3,0.5 --N 20,40,80,160,320
    python3 scripts/convergence_sweep.py --p 0.2,0.4 --variant printed

Prints one CSV block: N, then the sup error of each method, then fitted slopes.
"""
import argparse
from fractions import Fraction

from occupancy.edgeworth import approximate, sup_error_slope
from occupancy.exact import exact_pmf
from occupancy.scheme import SchemeParams

METHODS = ("gaussian", "thm2", "thm3", "what_u", "thm4")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--p", default="0.3,0.5")
    parser.add_argument("--N", default="20,40,80,160,320")
    parser.add_argument("--variant", choices=("fourier", "printed"), default="fourier")
    args = parser.parse_args()
    p = [Fraction(x) for x in args.p.split(",")]
    Ns = [int(x) for x in args.N.split(",")]

    sweeps = {m: [] for m in METHODS}
    print("N," + ",".join(METHODS))
    for N in Ns:
        params = SchemeParams.from_proportions(N, p)
        pmf = exact_pmf(params)
        row = []
        for m in METHODS:
            if m == "thm3" and N - params.n_max > 64:
                row.append("")
                continue
            err = approximate(m, params, pmf, variant=args.variant).sup_error
            sweeps[m].append((N, err))
            row.append(f"{float(err):.6e}")
        print(f"{N}," + ",".join(row))
    slopes = [f"{sup_error_slope(sweeps[m]):.4f}" if len(sweeps[m]) >= 3 else "" for m in METHODS]
    print("slope," + ",".join(slopes))


if __name__ == "__main__":
    main()
