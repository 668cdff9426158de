"""Prime-field arithmetic, point sets in F_p^2 / F_p^3 and their direction statistics.

Everything here works with least nonnegative residues.  Vectorised paths use
int64 numpy arrays; codes of points (x*p + y, or x*p^2 + y*p + z) key the
bitmaps and histograms used by the counting modules.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptySet,
    EvenModulus,
    MixedModulus,
    NotPrime,
    ParseError,
    ZeroInverse,
    ZeroVector,
)

FpVec2 = tuple[int, int]
FpVec3 = tuple[int, int, int]

# p**4 must fit in int64 for the packed SL2 keys.
VECTOR_P_LIMIT = 55_108
INV_TABLE_LIMIT = 1 << 20


def is_prime(n: int) -> bool:
    """Deterministic trial division; fine for desk-scale moduli."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    r = math.isqrt(n)
    f = 3
    while f <= r:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldCtx:
    p: int
    inv_table: np.ndarray | None = field(default=None, compare=False, repr=False)

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroInverse(f"0 has no inverse mod {self.p}")
        if self.inv_table is not None:
            return int(self.inv_table[a])
        return pow(a, -1, self.p)

    def inv_array(self, a: np.ndarray) -> np.ndarray:
        """Elementwise inverse; zero entries map to 0 (callers mask them)."""
        a = np.asarray(a, dtype=np.int64) % self.p
        if self.inv_table is not None:
            return self.inv_table[a]
        out = np.zeros_like(a)
        flat, res = a.ravel(), out.ravel()
        for i, v in enumerate(flat):
            if v:
                res[i] = pow(int(v), -1, self.p)
        return out

    def half(self) -> int:
        return self.inv(2)


def _build_inv_table(p: int) -> np.ndarray:
    # inv(a) = -(p // a) * inv(p % a) mod p
    inv = np.zeros(p, dtype=np.int64)
    if p > 1:
        inv[1] = 1
    for a in range(2, p):
        inv[a] = (-(p // a) * int(inv[p % a])) % p
    return inv


@lru_cache(maxsize=None)
def field_new(p: int) -> FieldCtx:
    """Validate an odd prime modulus and build its context."""
    p = int(p)
    if p == 2:
        raise EvenModulus("p = 2 is excluded; the modulus must be an odd prime")
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    table = _build_inv_table(p) if p <= INV_TABLE_LIMIT else None
    return FieldCtx(p, table)


def as_ctx(ctx_or_p: Union[FieldCtx, int]) -> FieldCtx:
    if isinstance(ctx_or_p, FieldCtx):
        return ctx_or_p
    return field_new(int(ctx_or_p))


def inv(ctx: FieldCtx, a: int) -> int:
    return as_ctx(ctx).inv(a)


def same_ctx(*objs) -> FieldCtx:
    """Common field of several objects carrying a ``ctx``; MixedModulus otherwise."""
    ps = {o.ctx.p for o in objs}
    if len(ps) != 1:
        raise MixedModulus(f"operands live over different fields: {sorted(ps)}")
    return objs[0].ctx


# -- the skew form ------------------------------------------------------------

def skew(ctx, x: Sequence[int], y: Sequence[int]) -> int:
    """x . y^perp with y^perp = (-y2, y1), i.e. -x1*y2 + x2*y1 mod p."""
    p = as_ctx(ctx).p
    return (-x[0] * y[1] + x[1] * y[0]) % p


def skew_table(X: np.ndarray, Y: np.ndarray, p: int) -> np.ndarray:
    """All pairwise skew values, shape (len(X), len(Y))."""
    X = np.asarray(X, dtype=np.int64)
    Y = np.asarray(Y, dtype=np.int64)
    return (-X[:, None, 0] * Y[None, :, 1] + X[:, None, 1] * Y[None, :, 0]) % p


def skew_histogram(X: np.ndarray, p: int, chunk: int = 2048) -> np.ndarray:
    """r(t) = #{(x1, x2) in X^2 : skew(x1, x2) = t} for t in F_p."""
    X = np.asarray(X, dtype=np.int64).reshape(-1, 2)
    hist = np.zeros(p, dtype=np.int64)
    for s in range(0, len(X), chunk):
        vals = skew_table(X[s:s + chunk], X, p)
        hist += np.bincount(vals.ravel(), minlength=p)
    return hist


# -- directions and lines -----------------------------------------------------

def direction_index(ctx, v: Sequence[int]) -> int:
    """Index in [0, p] of the line through the origin containing v != 0.

    (1, s) has index s; the vertical direction (0, 1) has index p.
    """
    c = as_ctx(ctx)
    x1, x2 = v[0] % c.p, v[1] % c.p
    if x1:
        return (x2 * c.inv(x1)) % c.p
    if x2:
        return c.p
    raise ZeroVector("the origin has no direction")


def direction_indices(ctx, pts: np.ndarray) -> np.ndarray:
    """Vectorised ``direction_index``; the origin maps to -1."""
    c = as_ctx(ctx)
    pts = np.asarray(pts, dtype=np.int64).reshape(-1, 2)
    x1, x2 = pts[:, 0], pts[:, 1]
    out = (x2 * c.inv_array(x1)) % c.p
    out = np.where(x1 == 0, c.p, out)
    return np.where((x1 == 0) & (x2 == 0), -1, out)


def direction_vector(ctx, d: int) -> FpVec2:
    """Canonical representative of direction index d."""
    p = as_ctx(ctx).p
    if d == p:
        return (0, 1)
    return (1, d % p)


@dataclass(frozen=True)
class Line:
    """The affine line a*x + b*y = c, normalised so the first nonzero of (a, b) is 1."""
    a: int
    b: int
    c: int
    p: int

    @classmethod
    def make(cls, ctx, a: int, b: int, c: int) -> "Line":
        k = as_ctx(ctx)
        a, b, c = a % k.p, b % k.p, c % k.p
        if a == 0 and b == 0:
            raise ZeroVector("(a, b) = (0, 0) does not define a line")
        s = k.inv(a if a else b)
        return cls(a * s % k.p, b * s % k.p, c * s % k.p, k.p)

    @classmethod
    def through(cls, ctx, point: Sequence[int], direction: Sequence[int]) -> "Line":
        """Line through ``point`` with direction vector ``direction``."""
        p = as_ctx(ctx).p
        d1, d2 = direction[0] % p, direction[1] % p
        # normal vector (d2, -d1)
        return cls.make(ctx, d2, -d1, d2 * point[0] - d1 * point[1])

    @property
    def through_origin(self) -> bool:
        return self.c == 0

    def contains(self, v: Sequence[int]) -> bool:
        return (self.a * v[0] + self.b * v[1] - self.c) % self.p == 0

    def points(self) -> np.ndarray:
        p = self.p
        t = np.arange(p, dtype=np.int64)
        if self.b:
            # y = b^{-1}(c - a x); b == 1 after normalisation whenever a == 0
            binv = pow(self.b, -1, p)
            return np.stack([t, (binv * (self.c - self.a * t)) % p], axis=1)
        return np.stack([np.full(p, self.c * pow(self.a, -1, p) % p), t], axis=1)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)


def origin_line(ctx, direction: Sequence[int]) -> Line:
    return Line.through(ctx, (0, 0), direction)


# -- point sets ---------------------------------------------------------------

def encode_points(pts: np.ndarray, p: int) -> np.ndarray:
    pts = np.asarray(pts, dtype=np.int64)
    code = np.zeros(len(pts), dtype=np.int64)
    for j in range(pts.shape[1]):
        code = code * p + pts[:, j]
    return code


def decode_points(codes: np.ndarray, p: int, dim: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    out = np.empty((len(codes), dim), dtype=np.int64)
    rest = codes.copy()
    for j in range(dim - 1, -1, -1):
        out[:, j] = rest % p
        rest //= p
    return out


class PointSet:
    """A finite subset of F_p^dim (dim 2 or 3), stored sorted by code without repeats."""

    __slots__ = ("ctx", "dim", "pts", "codes")

    def __init__(self, ctx, pts, dim: int | None = None):
        self.ctx = as_ctx(ctx)
        p = self.ctx.p
        arr = np.asarray(list(pts) if not isinstance(pts, np.ndarray) else pts, dtype=np.int64)
        if arr.size == 0:
            if dim is None:
                raise DimensionMismatch("dim is required for an empty point set")
            arr = arr.reshape(0, dim)
        if arr.ndim != 2:
            raise DimensionMismatch(f"points must form a 2-d array, got shape {arr.shape}")
        if dim is not None and arr.shape[1] != dim:
            raise DimensionMismatch(f"expected dimension {dim}, got {arr.shape[1]}")
        self.dim = arr.shape[1]
        if self.dim not in (2, 3):
            raise DimensionMismatch(f"only F_p^2 and F_p^3 are supported, got dim {self.dim}")
        if p > VECTOR_P_LIMIT:
            raise DimensionMismatch(f"p = {p} exceeds the vectorised limit {VECTOR_P_LIMIT}")
        arr = arr % p
        self.codes = np.unique(encode_points(arr, p))
        self.pts = decode_points(self.codes, p, self.dim)

    @classmethod
    def from_codes(cls, ctx, codes: np.ndarray, dim: int) -> "PointSet":
        c = as_ctx(ctx)
        return cls(c, decode_points(np.unique(codes), c.p, dim), dim)

    @classmethod
    def from_bitmap(cls, ctx, bitmap: np.ndarray, dim: int) -> "PointSet":
        return cls.from_codes(ctx, np.flatnonzero(bitmap), dim)

    @classmethod
    def full(cls, ctx, dim: int = 2) -> "PointSet":
        c = as_ctx(ctx)
        return cls.from_codes(c, np.arange(c.p ** dim, dtype=np.int64), dim)

    @property
    def p(self) -> int:
        return self.ctx.p

    def __len__(self) -> int:
        return len(self.codes)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        for row in self.pts:
            yield tuple(int(v) for v in row)

    def __contains__(self, v) -> bool:
        if len(v) != self.dim:
            return False
        code = 0
        for x in v:
            code = code * self.p + int(x) % self.p
        i = np.searchsorted(self.codes, code)
        return bool(i < len(self.codes) and self.codes[i] == code)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return (self.p == other.p and self.dim == other.dim
                and np.array_equal(self.codes, other.codes))

    def __hash__(self):
        return hash((self.p, self.dim, self.codes.tobytes()))

    def __repr__(self) -> str:
        head = ", ".join(str(t) for t in list(self)[:4])
        more = ", ..." if len(self) > 4 else ""
        return f"PointSet(p={self.p}, dim={self.dim}, n={len(self)}: {head}{more})"

    def bitmap(self) -> np.ndarray:
        bm = np.zeros(self.p ** self.dim, dtype=bool)
        bm[self.codes] = True
        return bm

    def union(self, other: "PointSet") -> "PointSet":
        same_ctx(self, other)
        if self.dim != other.dim:
            raise DimensionMismatch("cannot union point sets of different dimension")
        return PointSet.from_codes(self.ctx, np.concatenate([self.codes, other.codes]), self.dim)

    def contains_origin(self) -> bool:
        return len(self.codes) > 0 and self.codes[0] == 0

    def without_origin(self) -> "PointSet":
        return PointSet.from_codes(self.ctx, self.codes[self.codes != 0], self.dim)

    def third_coordinates(self) -> set[int]:
        if self.dim != 3:
            raise DimensionMismatch("third coordinates need a set in F_p^3")
        return {int(z) for z in np.unique(self.pts[:, 2])}


# -- statistics ---------------------------------------------------------------

@dataclass(frozen=True)
class DirectionStats:
    k1: int
    k2: int
    per_direction: dict[int, int]


def direction_stats(E: PointSet) -> DirectionStats:
    """Largest occupancy of a line through the origin and number of occupied directions.

    The origin itself is ignored.
    """
    if E.dim != 2:
        raise DimensionMismatch("direction statistics are defined for F_p^2")
    idx = direction_indices(E.ctx, E.pts)
    idx = idx[idx >= 0]
    counts = np.bincount(idx, minlength=E.p + 1)
    occupied = np.flatnonzero(counts)
    return DirectionStats(
        k1=int(counts.max()) if len(idx) else 0,
        k2=int(len(occupied)),
        per_direction={int(d): int(counts[d]) for d in occupied},
    )


def fiber_stats(E: PointSet) -> tuple[int, float]:
    """Largest fibre of (x, y, z) -> (y, z) and the matching exponent eps.

    eps = 1 - log_p(max_fiber), so a set whose fibres all have size at most
    p^(1-eps) gets the largest admissible eps.
    """
    if E.dim != 3:
        raise DimensionMismatch("fibre statistics are defined for F_p^3")
    if len(E) == 0:
        raise EmptySet("fibre statistics of an empty set")
    p = E.p
    yz = E.pts[:, 1] * p + E.pts[:, 2]
    m = int(np.bincount(yz).max())
    eps = 1.0 - math.log(m) / math.log(p)
    return m, min(1.0, max(0.0, eps))


# -- file format --------------------------------------------------------------

def _parse_header(line: str) -> dict[str, str]:
    out = {}
    for tok in line.split():
        if "=" not in tok:
            raise ParseError(f"malformed header token {tok!r}")
        k, v = tok.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def parse_residues(line: str, p: int, width: int, lineno: int) -> tuple[int, ...]:
    parts = [s.strip() for s in line.split(",")]
    if len(parts) != width:
        raise ParseError(f"line {lineno}: expected {width} entries, got {len(parts)}")
    try:
        vals = tuple(int(s) for s in parts)
    except ValueError as exc:
        raise ParseError(f"line {lineno}: {exc}") from None
    for v in vals:
        if not 0 <= v < p:
            raise ParseError(f"line {lineno}: residue {v} out of range [0, {p - 1}]")
    return vals


def read_header(text: str) -> tuple[dict[str, str], list[tuple[int, str]]]:
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError("empty file")
    return _parse_header(lines[0][1]), lines[1:]


def loads_point_set(text: str) -> PointSet:
    header, body = read_header(text)
    try:
        p, dim = int(header["p"]), int(header["dim"])
    except (KeyError, ValueError):
        raise ParseError("header must read 'p=<prime> dim=<2|3>'") from None
    if dim not in (2, 3):
        raise ParseError(f"dim must be 2 or 3, got {dim}")
    ctx = field_new(p)
    pts = [parse_residues(ln, p, dim, i) for i, ln in body]
    return PointSet(ctx, np.array(pts, dtype=np.int64).reshape(-1, dim), dim)


def dumps_point_set(E: PointSet) -> str:
    rows = [f"p={E.p} dim={E.dim}"]
    rows += [",".join(str(int(v)) for v in row) for row in E.pts]
    return "\n".join(rows) + "\n"


def read_point_set(path) -> PointSet:
    return loads_point_set(Path(path).read_text(encoding="utf-8"))


def write_point_set(E: PointSet, path) -> None:
    Path(path).write_text(dumps_point_set(E), encoding="utf-8")


def point_set(ctx, pts: Iterable[Sequence[int]], dim: int | None = None) -> PointSet:
    return PointSet(ctx, [tuple(v) for v in pts], dim)
