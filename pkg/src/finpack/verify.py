"""Invariant suite behind ``finpack verify``: one record per (check, p)."""
from __future__ import annotations

import itertools
import time
import zlib
from typing import Callable, Iterator

import numpy as np

from . import constructions as C
from .fourier import FOURIER_P_CAP, FpFunction, dft, idft, incidence_via_fourier
from .fp_core import PointSet, field_new, skew
from .groups import DEFAULT_ENUM_CAP, enumerate_h1, enumerate_sl2, max_coset_intersection, sl2_order, transporter_fiber
from .incidence_h1 import count_N, count_N_naive, count_Nprime, count_Nprime_naive, transporter_count_h1
from .incidence_sl2 import (
    count_incidences,
    count_incidences_naive,
    energy1,
    energy1_bruteforce,
    energy2,
    energy2_bruteforce,
)
from .packing import find_rich_point, image_set
from .sampling import random_points, random_sl2

Check = Callable[[int, np.random.Generator], tuple[bool, str]]
CHECKS: dict[str, Check] = {}


def register(name: str):
    def deco(fn: Check) -> Check:
        CHECKS[name] = fn
        return fn
    return deco


@register("sl2-order")
def _sl2_order(p, rng):
    G = enumerate_sl2(p, cap=DEFAULT_ENUM_CAP)
    return len(G) == sl2_order(p) and G.symmetric, f"|SL2| = {len(G)}"


@register("fiber-size")
def _fiber_size(p, rng):
    nz = [(a, b) for a in range(p) for b in range(p) if (a, b) != (0, 0)]
    pairs = itertools.product(nz, nz) if p <= 5 else (
        (nz[i], nz[j]) for i, j in rng.integers(0, len(nz), (50, 2)))
    bad = [(m, m2) for m, m2 in pairs if len(transporter_fiber(p, m, m2)) != p]
    return not bad, f"{len(bad)} fibres of wrong size"


@register("skew-invariance")
def _skew_invariance(p, rng):
    G = enumerate_sl2(p)
    ctx = field_new(p)
    idx = range(len(G)) if p == 3 else rng.integers(0, len(G), 200)
    els = list(G)
    for i in idx:
        g = els[int(i)]
        for x, y in rng.integers(0, p, (20, 2, 2)):
            if skew(ctx, g(x), g(y)) != skew(ctx, x, y):
                return False, f"{g} breaks the skew form"
    return True, ""


@register("incidence-oracle")
def _incidence_oracle(p, rng):
    ctx = field_new(p)
    A = random_points(ctx, p + 2, rng, exclude_origin=False)
    B = random_points(ctx, p + 1, rng, exclude_origin=False)
    S = random_sl2(ctx, min(40, sl2_order(p)), rng)
    fast, slow = count_incidences(A, B, S), count_incidences_naive(A, B, S)
    return fast == slow, f"{fast} vs {slow}"


@register("incidence-sharpness")
def _incidence_sharpness(p, rng):
    S = C.line_transporter(p, (1, 0), (0, 1))
    ctx = field_new(p)
    B = PointSet(ctx, [(t, 0) for t in range(p)])
    A = PointSet(ctx, [(0, t) for t in range(p)])
    got = count_incidences(A, B, S)
    want = p * (p - 1) + p * (p - 1) ** 2
    return got == want and len(S) == p * (p - 1), f"I = {got}, expected {want}"


@register("fourier")
def _fourier(p, rng):
    if p > FOURIER_P_CAP:
        return True, "skipped above the Fourier cap"
    ctx = field_new(p)
    f = FpFunction(p, 2, rng.normal(size=(p, p)))
    if not np.allclose(idft(dft(f)).table, f.table, atol=1e-10):
        return False, "inverse transform"
    A = random_points(ctx, p, rng, exclude_origin=False)
    B = random_points(ctx, p, rng, exclude_origin=False)
    S = random_sl2(ctx, 2 * p, rng)
    exact, approx = count_incidences(A, B, S), incidence_via_fourier(A, B, S)
    return abs(exact - approx) <= 1e-6 * max(1, exact), f"{exact} vs {approx:.6f}"


@register("energy-oracles")
def _energy_oracles(p, rng):
    ctx = field_new(p)
    A = random_points(ctx, 8, rng, exclude_origin=False)
    B = random_points(ctx, 6, rng, exclude_origin=False)
    S = random_sl2(ctx, min(16, sl2_order(p)), rng)
    ok = energy1(A, B) == energy1_bruteforce(A, B) and energy2(S) == energy2_bruteforce(S)
    return ok, ""


@register("energy-extremal")
def _energy_extremal(p, rng):
    F = C.energy_extremal_family(p)
    e = energy2(F)
    return e == energy2_bruteforce(F), f"E(S,S) = {e}, (p-1)^5 = {(p - 1) ** 5}"


@register("coset-full-group")
def _coset(p, rng):
    rep = max_coset_intersection(enumerate_sl2(p), 0.5)
    want = 1 / (p + 1)  # a Borel subgroup has index p + 1
    return abs(rep.max_ratio - want) < 1e-12, f"max ratio {rep.max_ratio:.4g}"


@register("h1-trichotomy")
def _h1_trichotomy(p, rng):
    X = enumerate_h1(p)
    els = list(X)
    tried = 0
    while tried < 40:
        x, y, z, u, v, w, u2 = (int(t) for t in rng.integers(0, p, 7))
        z, w = z or 1, w or 1
        y2 = int(rng.integers(0, p))
        v2 = (y2 * w + z * v - y * w) * pow(z, -1, p) % p
        x2 = int(rng.integers(0, p))
        src1, dst1, src2, dst2 = (x, y, z), (x2, y2, z), (u, v, w), (u2, v2, w)
        n, _ = transporter_count_h1(p, src1, dst1, src2, dst2)
        brute = sum(1 for g in els if g(src1) == dst1 and g(src2) == dst2)
        if n != brute:
            return False, f"{n} vs {brute} at {src1, dst1, src2, dst2}"
        tried += 1
    return True, ""


@register("h1-quadruples")
def _h1_quadruples(p, rng):
    ctx = field_new(p)
    A = random_points(ctx, 10, rng, dim=3, exclude_origin=False)
    B = random_points(ctx, 9, rng, dim=3, exclude_origin=False)
    nN, nNp = count_N(A, B), count_Nprime(A, B)
    ok = nN == count_N_naive(A, B) and nNp == count_Nprime_naive(A, B)
    # the p|A||B| cap only holds when no third coordinate vanishes
    A2 = random_points(ctx, 10, rng, dim=3, nonzero_last=True)
    B2 = random_points(ctx, 9, rng, dim=3, nonzero_last=True)
    capped = count_Nprime(A2, B2) <= p * len(A2) * len(B2)
    return ok and capped, f"N = {nN}, N' = {nNp}, cap {'holds' if capped else 'fails'}"


@register("constructions")
def _constructions(p, rng):
    C.prop13_extremal(p)
    C.obs2_config(p, 2)
    C.obs1_config(p, 1, p - 1)
    C.prop11_sharpness(p, p - 1)
    C.obs3_config(p, [1])
    C.obs4_config(p, [0, 1])
    C.obs5_config(p, [0, 1])
    return True, "all configurations self-verified"


@register("image-contains-E")
def _image(p, rng):
    ctx = field_new(p)
    E = random_points(ctx, p, rng)
    S = random_sl2(ctx, p, rng)
    return len(image_set(S, E)) >= len(E), ""


@register("rich-point")
def _rich(p, rng):
    _, count = find_rich_point(PointSet.full(field_new(p), 2))
    return count == p + 1, f"count {count}"


def run_checks(primes, seed: int = 0, names=None) -> Iterator[dict]:
    for p in primes:
        field_new(p)  # raises NotPrime / EvenModulus before any work
        for name, fn in CHECKS.items():
            if names and name not in names:
                continue
            rng = np.random.default_rng([seed, p, zlib.crc32(name.encode())])
            t0 = time.perf_counter()
            try:
                ok, detail = fn(p, rng)
            except Exception as exc:  # a crash is a failed check, not a crashed suite
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            yield {"check": name, "p": p, "ok": bool(ok), "detail": detail,
                   "seconds": round(time.perf_counter() - t0, 4)}

