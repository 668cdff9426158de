"""finpack command line.

Exit codes: 0 success, 1 a check failed, 2 usage error (bad arguments,
non-prime modulus, unreadable input, missing parameter).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import constructions as C
from .errors import CapExceeded, EvenModulus, FinpackError, MissingParam, NotPrime
from .fp_core import read_point_set, write_point_set
from .groups import (
    DEFAULT_ENUM_CAP,
    SL2,
    MatrixSet,
    enumerate_sl2,
    read_matrix_set,
    write_matrix_set,
)
from .incidence_h1 import H1_THEOREMS, count_incidences_h1, count_N, count_Nprime, evaluate_bound_h1
from .incidence_sl2 import (
    THEOREMS,
    count_incidences,
    empirical_epsilon,
    energy1,
    energy2,
    evaluate_bound,
    loads_weighted,
    normalize_theorem_id,
)
from .packing import PACKING_THEOREMS, compare, image_set
from .sweep import min_ratio, rows_to_csv, run_sweep
from .verify import CHECKS, run_checks


class UsageError(Exception):
    pass


def _primes(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
    else:
        print(text)


def _load(path, kind):
    if path is None:
        return None
    return read_point_set(path) if kind == "points" else read_matrix_set(path)


# -- subcommands --------------------------------------------------------------

def cmd_verify(args) -> int:
    primes = _primes(args.p or "3,5,7")
    for p in primes:
        if p > args.cap:
            raise UsageError(f"p = {p} exceeds the enumeration cap {args.cap}")
    names = set(args.only.split(",")) if args.only else None
    if names and names - CHECKS.keys():
        raise UsageError(f"unknown checks: {sorted(names - CHECKS.keys())}")
    lines, first_bad = [], None
    for rec in run_checks(primes, seed=args.seed, names=names):
        lines.append(json.dumps(rec))
        if not rec["ok"] and first_bad is None:
            first_bad = rec
    _emit(args, "\n".join(lines))
    if first_bad:
        print(f"FAILED: {first_bad['check']} at p={first_bad['p']}: {first_bad['detail']}", file=sys.stderr)
        return 1
    return 0


def _params(args) -> dict:
    out = {}
    for name in ("k", "k1", "k2", "eps", "gamma"):
        v = getattr(args, name, None)
        if v is not None:
            out[name] = v
    return out


def cmd_bounds(args) -> int:
    tid = normalize_theorem_id(args.theorem)
    prm = _params(args)
    if tid in H1_THEOREMS:
        rep = evaluate_bound_h1(tid, A=_load(args.A, "points"), B=_load(args.B, "points"),
                                X=_load(args.X, "matrices"), E=_load(args.E, "points"), **prm)
    elif tid in THEOREMS:
        inputs = dict(A=_load(args.A, "points"), B=_load(args.B, "points"), S=_load(args.S, "matrices"))
        if args.points or args.lines:
            if not (args.points and args.lines):
                raise MissingParam("point-line bounds need both --points and --lines")
            _, ctx, P = loads_weighted(Path(args.points).read_text(encoding="utf-8"))
            _, ctx2, L = loads_weighted(Path(args.lines).read_text(encoding="utf-8"))
            if ctx.p != ctx2.p:
                raise UsageError("points and lines use different moduli")
            inputs.update(P=P, L=L, ctx=ctx)
        rep = evaluate_bound(tid, **inputs, **prm)
    else:
        raise UsageError(f"unknown theorem {args.theorem!r}; packing bounds live under 'pack'")
    _emit(args, rep.to_json(indent=2))
    return 0


def cmd_pack(args) -> int:
    if args.theorem not in PACKING_THEOREMS:
        raise UsageError(f"unknown packing theorem {args.theorem!r}")
    S, E = _load(args.S or args.X, "matrices"), _load(args.E, "points")
    if S is None or E is None:
        raise MissingParam("pack needs a group set (--S or --X) and --E")
    rep = compare(S, E, args.theorem, _params(args), seed=args.seed)
    if args.format == "csv":
        _emit(args, rows_to_csv([rep.csv_row()]).rstrip("\n"))
    else:
        _emit(args, rep.to_json(indent=2))
    return 0


def _construct(args):
    cid, p = args.config, args.p_int
    if cid == "obs1":
        return C.obs1_config(p, args.dA, args.dB)
    if cid == "obs2":
        return C.obs2_config(p, args.num_lines)
    if cid == "prop11":
        return C.prop11_sharpness(p, args.d)
    if cid == "prop13":
        return C.prop13_extremal(p, args.num_lines)
    if cid in ("obs3", "obs4", "obs5"):
        values = _primes(args.values) if args.values else [1, 2]
        return C.CONSTRUCTIONS[cid](p, values)
    if cid == "energy-extremal":
        S = C.energy_extremal_family(p)
        cfg = C.NamedConfig(cid, p, {"S": S}, {"|S|": C.Expectation((p - 1) ** 2)}, {"|S|": len(S)})
        cfg.actual["E(S,S)"] = energy2(S)
        return cfg.verified()
    if cid == "line-transporter":
        S = C.line_transporter(p, (1, 0), (0, 1))
        return C.NamedConfig(cid, p, {"S": S}, {"|S|": C.Expectation(p * (p - 1))}, {"|S|": len(S)}).verified()
    raise UsageError(f"unknown configuration {cid!r}")


def cmd_construct(args) -> int:
    if args.p is None:
        raise UsageError("construct needs --p")
    args.p_int = int(args.p)
    cfg = _construct(args)
    manifest = cfg.manifest()
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        files = {}
        for name, obj in cfg.sets.items():
            fname = name.replace("(", "_").replace(")", "").replace("'", "prime") + ".txt"
            if isinstance(obj, MatrixSet):
                write_matrix_set(obj, out / fname)
            else:
                write_point_set(obj, out / fname)
            files[name] = fname
        manifest["files"] = files
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
        print(json.dumps({"written": str(out), "files": files}))
    else:
        print(json.dumps(manifest, indent=2))
    return 0


def cmd_sweep(args) -> int:
    threads = args.threads or os.cpu_count() or 1
    rows = run_sweep(args.spec, threads=threads)
    if args.format == "json":
        _emit(args, json.dumps(rows, indent=2, default=str))
    else:
        _emit(args, rows_to_csv(rows).rstrip("\n"))
    if rows:
        print(f"{len(rows)} rows, min ratio {min_ratio(rows):.4g}", file=sys.stderr)
    return 0


def cmd_energy(args) -> int:
    out = {}
    if args.S:
        S = read_matrix_set(args.S)
        if S.kind != SL2:
            raise UsageError("energy of a group set needs an SL2 set")
        out.update(S_size=len(S), energy2=energy2(S), empirical_eps=empirical_epsilon(S) if len(S) else None)
    if args.A:
        A = read_point_set(args.A)
        B = read_point_set(args.B) if args.B else A
        if A.dim == 2:
            out.update(energy1=energy1(A, B))
        else:
            out.update(N=count_N(A, B), N_prime=count_Nprime(A, B))
    if not out:
        raise UsageError("energy needs --S and/or --A")
    _emit(args, json.dumps(out, indent=2))
    return 0


def cmd_incidence(args) -> int:
    A, B = _load(args.A, "points"), _load(args.B, "points")
    G = _load(args.S or args.X, "matrices")
    if args.full:
        G = enumerate_sl2(args.full, cap=args.cap)
    if A is None or B is None or G is None:
        raise MissingParam("incidence needs --A, --B and a group set (--S, --X or --full)")
    n = count_incidences(A, B, G) if G.kind == SL2 else count_incidences_h1(A, B, G)
    out = {"A": len(A), "B": len(B), "group": G.kind, "size": len(G), "incidences": n}
    if args.image:
        out["image_size"] = len(image_set(G, B))
    _emit(args, json.dumps(out, indent=2))
    return 0


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", help="prime, or a comma list / range such as 3,5,7 or 3-13")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=None)
    common.add_argument("--format", choices=("json", "csv"), default=None, help="json (default) or csv; sweep defaults to csv")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--eps", type=float)
    common.add_argument("--gamma", type=float)
    common.add_argument("--cap", type=int, default=DEFAULT_ENUM_CAP, help="largest p for full enumeration")

    sets = argparse.ArgumentParser(add_help=False)
    for flag in ("A", "B", "E"):
        sets.add_argument(f"--{flag}", help="point-set file")
    for flag in ("S", "X"):
        sets.add_argument(f"--{flag}", help="group-set file")
    for flag in ("k", "k1", "k2"):
        sets.add_argument(f"--{flag}", type=int)

    ap = argparse.ArgumentParser(prog="finpack", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    v.add_argument("--only", help="comma list of check names")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bounds", parents=[common, sets], help="exact count against a bound")
    b.add_argument("theorem", help=", ".join(list(THEOREMS) + list(H1_THEOREMS)))
    b.add_argument("--points", help="weighted points file for point-line bounds")
    b.add_argument("--lines", help="weighted lines file for point-line bounds")
    b.set_defaults(func=cmd_bounds)

    pk = sub.add_parser("pack", parents=[common, sets], help="|S(E)| against a lower bound")
    pk.add_argument("theorem", choices=list(PACKING_THEOREMS))
    pk.set_defaults(func=cmd_pack)

    c = sub.add_parser("construct", parents=[common], help="emit an extremal configuration")
    c.add_argument("config", choices=list(C.CONSTRUCTIONS) + ["energy-extremal", "line-transporter"])
    c.add_argument("--dA", type=int, default=1)
    c.add_argument("--dB", type=int, default=2)
    c.add_argument("--d", type=int, default=2)
    c.add_argument("--num-lines", type=int, default=None)
    c.add_argument("--values", help="comma list of residues (T for obs3, A for obs4 and obs5)")
    c.set_defaults(func=cmd_construct)

    s = sub.add_parser("sweep", parents=[common], help="run a JSON sweep spec")
    s.add_argument("spec")
    s.set_defaults(func=cmd_sweep)

    e = sub.add_parser("energy", parents=[common, sets], help="energies and quadruple counts")
    e.set_defaults(func=cmd_energy)

    i = sub.add_parser("incidence", parents=[common, sets], help="exact incidence count")
    i.add_argument("--full", type=int, help="use all of SL2(F_p) for this p")
    i.add_argument("--image", action="store_true", help="also report |G(B)|")
    i.set_defaults(func=cmd_incidence)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "construct" and args.num_lines is None and args.config == "obs2":
        args.num_lines = 2
    try:
        return args.func(args)
    except (UsageError, NotPrime, EvenModulus, MissingParam, CapExceeded, FileNotFoundError) as exc:
        print(f"finpack: error: {exc}", file=sys.stderr)
        return 2
    except FinpackError as exc:
        print(f"finpack: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
