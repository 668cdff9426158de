"""Empirical implied constants: run a sweep and summarise the ratio column
per (theorem, p).

    python3 scripts/calibrate.py scripts/example_sweep.json --csv out.csv
"""
import argparse
import statistics
import sys
import time
from collections import defaultdict
from pathlib import Path

from finpack.sweep import rows_to_csv, run_sweep


def summarise(rows):
    groups = defaultdict(list)
    for r in rows:
        groups[(r["theorem"], int(r["p"]))].append(float(r["ratio"]))
    print(f"{'theorem':<10} {'p':>4} {'n':>4} {'min':>9} {'median':>9} {'max':>9}")
    for (tid, p), vals in sorted(groups.items()):
        print(f"{tid:<10} {p:>4} {len(vals):>4} {min(vals):>9.4g} {statistics.median(vals):>9.4g} {max(vals):>9.4g}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("spec")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--csv", help="also write the raw rows here")
    args = ap.parse_args(argv)

    t0 = time.perf_counter()
    rows = run_sweep(args.spec, threads=args.threads)
    print(f"{len(rows)} instances in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    if args.csv:
        Path(args.csv).write_text(rows_to_csv(rows), encoding="utf-8")
    summarise(rows)


if __name__ == "__main__":
    main()
