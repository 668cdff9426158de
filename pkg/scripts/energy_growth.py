"""E(S,S) of the extremal family against (p-1)^5 and (p-1)^6."""
import argparse

from finpack.constructions import energy_extremal_family
from finpack.fp_core import is_prime
from finpack.incidence_sl2 import energy2, evaluate_bound


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-p", type=int, default=23)
    args = ap.parse_args(argv)
    print(f"{'p':>4} {'|S|':>6} {'E(S,S)':>12} {'/(p-1)^5':>9} {'/(p-1)^6':>9} {'bnp const':>10}")
    for p in range(3, args.max_p + 1):
        if not is_prime(p):
            continue
        S = energy_extremal_family(p)
        e = energy2(S)
        const = evaluate_bound("bnp", S=S).empirical_constant
        print(f"{p:>4} {len(S):>6} {e:>12} {e / (p - 1) ** 5:>9.4f} {e / (p - 1) ** 6:>9.4f} {const:>10.4g}")


if __name__ == "__main__":
    main()
