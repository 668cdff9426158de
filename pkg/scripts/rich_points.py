"""How rich is the richest point?  For random E with |E| >= 4p, the number of
lines through the best point of E that meet E again, divided by p."""
import argparse

import numpy as np

from finpack.fp_core import field_new
from finpack.packing import find_rich_point
from finpack.sampling import random_points


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--primes", default="7,11,13,17,19,23")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    for p in map(int, args.primes.split(",")):
        ctx = field_new(p)
        fracs = []
        for _ in range(args.trials):
            E = random_points(ctx, int(rng.integers(4 * p, p * p + 1)), rng, exclude_origin=False)
            fracs.append(find_rich_point(E)[1] / p)
        print(f"p={p:<3} min {min(fracs):.3f}  mean {np.mean(fracs):.3f}  (guarantee 0.5)")


if __name__ == "__main__":
    main()
