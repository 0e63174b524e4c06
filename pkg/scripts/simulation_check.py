"""Monte Carlo PMF against the exact one, over a few seeds and thread counts."""
import argparse

from occupancy.exact import exact_pmf
from occupancy.scheme import SchemeParams, derive
from occupancy.simulate import SimConfig, empirical_pmf, mc_mean_ci, tv_distance


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cells", type=int, default=20)
    parser.add_argument("--sets", default="5,7,3")
    parser.add_argument("--trials", type=int, default=100_000)
    parser.add_argument("--seeds", type=int, default=5)
    args = parser.parse_args()
    params = SchemeParams(args.cells, tuple(int(x) for x in args.sets.split(",")))
    pmf = exact_pmf(params)
    target = float(derive(params).mean_mu0)
    print("seed,threads,tv,mean,half_width,covers")
    for seed in range(args.seeds):
        for threads in (1, 4):
            emp = empirical_pmf(SimConfig(params, args.trials, seed), threads=threads)
            mean, half = mc_mean_ci(emp)
            print(f"{seed},{threads},{tv_distance(emp, pmf):.5f},{mean:.5f},{half:.5f},{abs(mean - target) <= half}")


if __name__ == "__main__":
    main()
