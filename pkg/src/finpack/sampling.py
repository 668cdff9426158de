"""Seeded random sets: points, SL2 subsets, H1 subsets."""
from __future__ import annotations

import math

import numpy as np

from .fp_core import PointSet, as_ctx
from .groups import H1_MATRIX, SL2, MatrixSet, decode_keys, sl2_from_index, sl2_order


def instance_seed(seed: int, *path: int) -> int:
    """A 32-bit seed derived from (seed, *path); stable across runs and worker counts."""
    return int(np.random.SeedSequence([int(seed), *map(int, path)]).generate_state(1)[0])


def random_points(ctx, n: int, rng: np.random.Generator, dim: int = 2, exclude_origin: bool = True,
                  nonzero_last: bool = False) -> PointSet:
    """n distinct points of F_p^dim, uniformly without replacement.

    ``nonzero_last`` restricts to points whose last coordinate is nonzero.
    """
    c = as_ctx(ctx)
    if nonzero_last:
        universe = c.p ** (dim - 1) * (c.p - 1)
        n = min(n, universe)
        j = np.asarray(rng.choice(universe, size=n, replace=False), dtype=np.int64)
        codes = (j // (c.p - 1)) * c.p + j % (c.p - 1) + 1
        return PointSet.from_codes(c, codes, dim)
    universe = c.p ** dim
    lo = 1 if exclude_origin else 0
    n = min(n, universe - lo)
    codes = rng.choice(universe - lo, size=n, replace=False) + lo
    return PointSet.from_codes(c, np.asarray(codes, dtype=np.int64), dim)


def random_sl2(ctx, n: int, rng: np.random.Generator) -> MatrixSet:
    """n distinct elements of SL2(F_p) drawn through the index bijection."""
    c = as_ctx(ctx)
    n = min(n, sl2_order(c.p))
    idx = rng.choice(sl2_order(c.p), size=n, replace=False)
    return MatrixSet(c, SL2, sl2_from_index(c, idx))


def random_h1(ctx, n: int, rng: np.random.Generator) -> MatrixSet:
    c = as_ctx(ctx)
    n = min(n, c.p ** 3)
    keys = rng.choice(c.p ** 3, size=n, replace=False)
    return MatrixSet(c, H1_MATRIX, decode_keys(keys, c.p, 3))


def log_uniform_size(rng: np.random.Generator, lo: int, hi: int) -> int:
    """Integer in [lo, hi] whose logarithm is uniform."""
    lo, hi = max(1, int(lo)), max(1, int(hi))
    if hi <= lo:
        return lo
    return int(min(hi, max(lo, round(math.exp(rng.uniform(math.log(lo), math.log(hi)))))))
