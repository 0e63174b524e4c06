"""Characteristic function through the conditioning integral vs. the exact one."""
import argparse

from occupancy.bartlett import QuadratureSpec, verify
from occupancy.scheme import SchemeParams

CASES = [(6, (2, 3)), (12, (4, 6)), (20, (5, 9)), (8, (2, 3, 4))]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--t", default="0.25,0.5,1,2,3")
    parser.add_argument("--tol", type=float, default=1e-10)
    args = parser.parse_args()
    ts = [float(x) for x in args.t.split(",")]
    print("N,n,t,re,im,abs_diff")
    for N, n in CASES:
        for row in verify(SchemeParams(N, n), ts, QuadratureSpec(tol=args.tol)):
            print(f"{N},{';'.join(map(str, n))},{row['t']},{row['bartlett_re']:.12f},"
                  f"{row['bartlett_im']:.12f},{row['abs_diff']:.2e}")


if __name__ == "__main__":
    main()
