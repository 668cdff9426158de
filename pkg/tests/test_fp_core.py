import math

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from finpack.errors import DimensionMismatch, EmptySet, EvenModulus, MixedModulus, NotPrime, ZeroInverse
from finpack.fp_core import (
    Line,
    PointSet,
    direction_index,
    direction_indices,
    direction_stats,
    direction_vector,
    fiber_stats,
    field_new,
    is_prime,
    origin_line,
    same_ctx,
    skew,
    skew_histogram,
    skew_table,
)

from conftest import point_sets, primes


def test_field_rejects_bad_moduli():
    with pytest.raises(NotPrime):
        field_new(4)
    with pytest.raises(NotPrime):
        field_new(1)
    with pytest.raises(EvenModulus):
        field_new(2)


def test_is_prime_against_sieve():
    sieve = [True] * 500
    sieve[0] = sieve[1] = False
    for i in range(2, 23):
        for j in range(i * i, 500, i):
            sieve[j] = False
    assert [n for n in range(500) if is_prime(n)] == [n for n in range(500) if sieve[n]]


@given(primes, st.integers())
def test_inverse(p, a):
    ctx = field_new(p)
    if a % p == 0:
        with pytest.raises(ZeroInverse):
            ctx.inv(a)
    else:
        assert a * ctx.inv(a) % p == 1


def test_inverse_without_table_matches_table():
    ctx = field_new(101)
    arr = np.arange(101)
    assert np.array_equal(ctx.inv_array(arr)[1:], [pow(int(a), -1, 101) for a in arr[1:]])
    assert ctx.inv_array(arr)[0] == 0
    assert ctx.half() == 51


def test_skew_examples():
    ctx = field_new(5)
    assert skew(ctx, (1, 0), (0, 1)) == 4
    assert skew(ctx, (0, 1), (1, 0)) == 1
    assert skew(ctx, (2, 3), (2, 3)) == 0


@given(point_sets(max_size=12))
def test_skew_table_matches_scalar(E):
    ctx = E.ctx
    T = skew_table(E.pts, E.pts, ctx.p)
    for i, x in enumerate(E):
        for j, y in enumerate(E):
            assert T[i, j] == skew(ctx, x, y)
            assert T[i, j] == (-T[j, i]) % ctx.p
    hist = skew_histogram(E.pts, ctx.p)
    assert hist.sum() == len(E) ** 2
    assert np.array_equal(hist, np.bincount(T.ravel(), minlength=ctx.p))


@given(primes)
def test_direction_index_roundtrip(p):
    ctx = field_new(p)
    seen = {}
    for x in range(p):
        for y in range(p):
            if (x, y) == (0, 0):
                continue
            d = direction_index(ctx, (x, y))
            seen.setdefault(d, []).append((x, y))
            vx, vy = direction_vector(ctx, d)
            assert (x * vy - y * vx) % p == 0
    assert sorted(seen) == list(range(p + 1))
    assert all(len(v) == p - 1 for v in seen.values())
    pts = np.array([(x, y) for x in range(p) for y in range(p)])
    idx = direction_indices(ctx, pts)
    assert idx[0] == -1
    assert all(idx[i] == direction_index(ctx, tuple(pts[i])) for i in range(1, len(pts)))


def test_direction_of_origin_rejected():
    with pytest.raises(ValueError):
        direction_index(field_new(5), (0, 0))


def test_line_normalisation_and_points():
    ctx = field_new(7)
    a = Line.make(ctx, 2, 4, 6)
    b = Line.make(ctx, 1, 2, 3)
    assert a == b
    pts = a.points()
    assert len(pts) == 7
    assert all(a.contains(tuple(v)) for v in pts)
    vert = Line.make(ctx, 3, 0, 1)
    assert all(vert.contains(tuple(v)) for v in vert.points())
    ell = origin_line(ctx, (1, 3))
    assert ell.through_origin and ell.contains((2, 6))
    assert Line.through(ctx, (1, 1), (0, 1)).contains((1, 5))


def test_pointset_dedups_and_reduces():
    ctx = field_new(5)
    E = PointSet(ctx, [(1, 2), (6, 7), (0, 0)])
    assert len(E) == 2
    assert (1, 2) in E and (0, 0) in E
    assert E.contains_origin()
    assert len(E.without_origin()) == 1
    assert E == PointSet(ctx, [(0, 0), (1, 2)])
    assert len(PointSet.full(ctx, 3)) == 125


def test_pointset_mixed_moduli():
    A = PointSet(field_new(5), [(1, 1)])
    B = PointSet(field_new(7), [(1, 1)])
    with pytest.raises(MixedModulus):
        same_ctx(A, B)


@given(point_sets(max_size=25))
def test_bitmap_roundtrip(E):
    F = PointSet.from_bitmap(E.ctx, E.bitmap(), E.dim)
    assert F == E


def test_direction_stats():
    ctx = field_new(5)
    E = PointSet(ctx, [(1, 0), (2, 0), (3, 0), (0, 1), (1, 1), (0, 0)])
    st_ = direction_stats(E)
    assert (st_.k1, st_.k2) == (3, 3)
    assert sum(st_.per_direction.values()) == 5


def test_fiber_stats():
    ctx = field_new(5)
    E = PointSet(ctx, [(x, 1, 1) for x in range(5)] + [(0, 2, 1)], dim=3)
    m, eps = fiber_stats(E)
    assert m == 5 and eps == 0.0
    m, eps = fiber_stats(PointSet(ctx, [(0, 1, 1)], dim=3))
    assert m == 1 and eps == 1.0
    E = PointSet(ctx, [(0, 1, 1), (1, 1, 1)], dim=3)
    assert math.isclose(fiber_stats(E)[1], 1 - math.log(2, 5))
    with pytest.raises(EmptySet):
        fiber_stats(PointSet(ctx, [], dim=3))
    with pytest.raises(DimensionMismatch):
        fiber_stats(PointSet(ctx, [(1, 1)]))
