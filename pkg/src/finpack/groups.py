"""SL_2(F_p) and the Heisenberg group H_1(F_p): elements, actions, enumeration, transporters.

Single elements are small frozen dataclasses operating on Python ints.  Sets of
elements (``MatrixSet``) keep an (n, 4) or (n, 3) int64 array of entries sorted
by a packed integer key, which is what the counting code iterates over.

H_1 has two coordinate systems.  In the *matrix* convention [x, y, t] is the
upper unitriangular matrix with x, y above the diagonal and t in the corner, so
the product has central term t + t' + x*y'.  The *symmetric* convention uses
t + t' + (x*y' - y*x')/2.  The map (x, y, t) -> (x, y, t + xy/2) takes the
symmetric coordinates to the matrix ones.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    CapExceeded,
    ConventionMismatch,
    DependentBasis,
    MixedModulus,
    ParseError,
    ZeroVector,
)
from .fp_core import (
    FieldCtx,
    VECTOR_P_LIMIT,
    as_ctx,
    direction_indices,
    direction_vector,
    field_new,
    parse_residues,
    read_header,
    skew,
)

DEFAULT_ENUM_CAP = 31
SL2 = "sl2"
H1_MATRIX = "h1-matrix"
H1_SYMMETRIC = "h1-symmetric"
KINDS = (SL2, H1_MATRIX, H1_SYMMETRIC)
EXCEPTIONAL_ORDER = 120


# -- single elements ----------------------------------------------------------

@dataclass(frozen=True, slots=True)
class SL2Elem:
    a: int
    b: int
    c: int
    d: int
    p: int

    def __post_init__(self):
        p = self.p
        if not all(0 <= v < p for v in (self.a, self.b, self.c, self.d)):
            raise ValueError(f"entries of {self} are not reduced mod {p}")
        if (self.a * self.d - self.b * self.c) % p != 1:
            raise ValueError(f"{self} does not have determinant 1")

    @classmethod
    def make(cls, ctx, a, b, c, d) -> "SL2Elem":
        p = as_ctx(ctx).p
        return cls(a % p, b % p, c % p, d % p, p)

    @classmethod
    def identity(cls, ctx) -> "SL2Elem":
        return cls(1, 0, 0, 1, as_ctx(ctx).p)

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    @property
    def key(self) -> int:
        p = self.p
        return ((self.a * p + self.b) * p + self.c) * p + self.d

    def __matmul__(self, other: "SL2Elem") -> "SL2Elem":
        return sl2_mul(self, other)

    def inv(self) -> "SL2Elem":
        return sl2_inv(self)

    def __call__(self, v: Sequence[int]) -> tuple[int, int]:
        return sl2_act(self, v)


@dataclass(frozen=True, slots=True)
class H1Elem:
    x: int
    y: int
    t: int
    p: int
    convention: str = H1_MATRIX

    def __post_init__(self):
        if self.convention not in (H1_MATRIX, H1_SYMMETRIC):
            raise ValueError(f"unknown H1 convention {self.convention!r}")
        if not all(0 <= v < self.p for v in (self.x, self.y, self.t)):
            raise ValueError(f"coordinates of {self} are not reduced mod {self.p}")

    @classmethod
    def make(cls, ctx, x, y, t, convention: str = H1_MATRIX) -> "H1Elem":
        p = as_ctx(ctx).p
        return cls(x % p, y % p, t % p, p, convention)

    @classmethod
    def identity(cls, ctx, convention: str = H1_MATRIX) -> "H1Elem":
        return cls(0, 0, 0, as_ctx(ctx).p, convention)

    @property
    def coords(self) -> tuple[int, int, int]:
        return (self.x, self.y, self.t)

    @property
    def key(self) -> int:
        return (self.x * self.p + self.y) * self.p + self.t

    def __matmul__(self, other: "H1Elem") -> "H1Elem":
        return h1_mul(self, other)

    def inv(self) -> "H1Elem":
        return h1_inv(self)

    def __call__(self, v: Sequence[int]) -> tuple[int, int, int]:
        return h1_act(self, v)


def sl2_mul(g: SL2Elem, h: SL2Elem) -> SL2Elem:
    if g.p != h.p:
        raise MixedModulus(f"cannot multiply elements mod {g.p} and mod {h.p}")
    p = g.p
    return SL2Elem((g.a * h.a + g.b * h.c) % p, (g.a * h.b + g.b * h.d) % p,
                   (g.c * h.a + g.d * h.c) % p, (g.c * h.b + g.d * h.d) % p, p)


def sl2_inv(g: SL2Elem) -> SL2Elem:
    p = g.p
    return SL2Elem(g.d, (-g.b) % p, (-g.c) % p, g.a, p)


def sl2_act(g: SL2Elem, v: Sequence[int]) -> tuple[int, int]:
    p = g.p
    return ((g.a * v[0] + g.b * v[1]) % p, (g.c * v[0] + g.d * v[1]) % p)


def h1_convert(g: H1Elem, convention: str) -> H1Elem:
    """Re-express ``g`` in the other coordinate system (same group element)."""
    if g.convention == convention:
        return g
    half = pow(2, -1, g.p)
    shift = half * g.x * g.y
    if convention == H1_MATRIX:
        return H1Elem(g.x, g.y, (g.t + shift) % g.p, g.p, H1_MATRIX)
    return H1Elem(g.x, g.y, (g.t - shift) % g.p, g.p, H1_SYMMETRIC)


def h1_mul(g: H1Elem, h: H1Elem, convention: str | None = None) -> H1Elem:
    if g.p != h.p:
        raise MixedModulus(f"cannot multiply elements mod {g.p} and mod {h.p}")
    if g.convention != h.convention:
        raise ConventionMismatch(f"{g.convention} times {h.convention}")
    if convention is not None and convention != g.convention:
        raise ConventionMismatch(f"operands use {g.convention}, requested {convention}")
    p = g.p
    if g.convention == H1_MATRIX:
        t = g.t + h.t + g.x * h.y
    else:
        t = g.t + h.t + pow(2, -1, p) * (g.x * h.y - g.y * h.x)
    return H1Elem((g.x + h.x) % p, (g.y + h.y) % p, t % p, p, g.convention)


def h1_inv(g: H1Elem) -> H1Elem:
    p = g.p
    if g.convention == H1_MATRIX:
        return H1Elem((-g.x) % p, (-g.y) % p, (g.x * g.y - g.t) % p, p, H1_MATRIX)
    return H1Elem((-g.x) % p, (-g.y) % p, (-g.t) % p, p, H1_SYMMETRIC)


def h1_act(g: H1Elem, v: Sequence[int]) -> tuple[int, int, int]:
    """Apply the unitriangular matrix of g to the column vector v."""
    m = h1_convert(g, H1_MATRIX)
    p = g.p
    X, Y, Z = v
    return ((X + m.x * Y + m.t * Z) % p, (Y + m.y * Z) % p, Z % p)


# -- vectorised kernels -------------------------------------------------------

def sl2_keys(entries: np.ndarray, p: int) -> np.ndarray:
    e = np.asarray(entries, dtype=np.int64).reshape(-1, 4)
    return ((e[:, 0] * p + e[:, 1]) * p + e[:, 2]) * p + e[:, 3]


def h1_keys(entries: np.ndarray, p: int) -> np.ndarray:
    e = np.asarray(entries, dtype=np.int64).reshape(-1, 3)
    return (e[:, 0] * p + e[:, 1]) * p + e[:, 2]


def decode_keys(keys: np.ndarray, p: int, width: int) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.int64)
    out = np.empty((len(keys), width), dtype=np.int64)
    rest = keys.copy()
    for j in range(width - 1, -1, -1):
        out[:, j] = rest % p
        rest //= p
    return out


def sl2_apply(entries: np.ndarray, pts: np.ndarray, p: int) -> np.ndarray:
    """Images theta(y) for every theta (rows of entries) and y, shape (nS, nY, 2)."""
    e = np.asarray(entries, dtype=np.int64).reshape(-1, 4)
    y = np.asarray(pts, dtype=np.int64).reshape(-1, 2)
    X = (e[:, None, 0] * y[None, :, 0] + e[:, None, 1] * y[None, :, 1]) % p
    Y = (e[:, None, 2] * y[None, :, 0] + e[:, None, 3] * y[None, :, 1]) % p
    return np.stack([X, Y], axis=-1)


def sl2_apply_codes(entries: np.ndarray, pts: np.ndarray, p: int) -> np.ndarray:
    """Codes x*p + y of all images, shape (nS, nY)."""
    e = np.asarray(entries, dtype=np.int64).reshape(-1, 4)
    y = np.asarray(pts, dtype=np.int64).reshape(-1, 2)
    X = (e[:, None, 0] * y[None, :, 0] + e[:, None, 1] * y[None, :, 1]) % p
    Y = (e[:, None, 2] * y[None, :, 0] + e[:, None, 3] * y[None, :, 1]) % p
    return X * p + Y


def h1_apply_codes(entries: np.ndarray, pts: np.ndarray, p: int) -> np.ndarray:
    """Codes of theta(v) for matrix-convention entries (a, b, c); shape (nX, nV)."""
    e = np.asarray(entries, dtype=np.int64).reshape(-1, 3)
    v = np.asarray(pts, dtype=np.int64).reshape(-1, 3)
    X = (v[None, :, 0] + e[:, None, 0] * v[None, :, 1] + e[:, None, 2] * v[None, :, 2]) % p
    Y = (v[None, :, 1] + e[:, None, 1] * v[None, :, 2]) % p
    Z = np.broadcast_to(v[None, :, 2], X.shape)
    return (X * p + Y) * p + Z


def sl2_product_entries(L: np.ndarray, R: np.ndarray, p: int) -> np.ndarray:
    """All products l @ r for l in L, r in R, flattened row-major, shape (nL*nR, 4)."""
    L = np.asarray(L, dtype=np.int64).reshape(-1, 4)
    R = np.asarray(R, dtype=np.int64).reshape(-1, 4)
    a = (L[:, None, 0] * R[None, :, 0] + L[:, None, 1] * R[None, :, 2]) % p
    b = (L[:, None, 0] * R[None, :, 1] + L[:, None, 1] * R[None, :, 3]) % p
    c = (L[:, None, 2] * R[None, :, 0] + L[:, None, 3] * R[None, :, 2]) % p
    d = (L[:, None, 2] * R[None, :, 1] + L[:, None, 3] * R[None, :, 3]) % p
    return np.stack([a.ravel(), b.ravel(), c.ravel(), d.ravel()], axis=1)


def sl2_inverse_entries(entries: np.ndarray, p: int) -> np.ndarray:
    e = np.asarray(entries, dtype=np.int64).reshape(-1, 4)
    return np.stack([e[:, 3], (-e[:, 1]) % p, (-e[:, 2]) % p, e[:, 0]], axis=1)


def h1_matrix_inverse_entries(entries: np.ndarray, p: int) -> np.ndarray:
    e = np.asarray(entries, dtype=np.int64).reshape(-1, 3)
    return np.stack([(-e[:, 0]) % p, (-e[:, 1]) % p, (e[:, 0] * e[:, 1] - e[:, 2]) % p], axis=1)


def h1_convert_entries(entries: np.ndarray, p: int, src: str, dst: str) -> np.ndarray:
    e = np.asarray(entries, dtype=np.int64).reshape(-1, 3).copy()
    if src == dst:
        return e
    shift = pow(2, -1, p) * e[:, 0] % p * e[:, 1] % p
    e[:, 2] = (e[:, 2] + shift) % p if dst == H1_MATRIX else (e[:, 2] - shift) % p
    return e


def _nonzero_vector(j: np.ndarray, p: int) -> np.ndarray:
    # index j in [0, p^2 - 1) -> the (j+1)-th nonzero vector in code order
    code = np.asarray(j, dtype=np.int64) + 1
    return np.stack([code // p, code % p], axis=1)


def sl2_from_index(ctx, idx) -> np.ndarray:
    """Bijection [0, p(p^2-1)) -> SL_2(F_p), returned as an (n, 4) entry array.

    Index i picks the first column m = (a, c) != 0 via i // p and the second
    column as n0 + t*m with t = i % p, where n0 is a fixed column giving det 1.
    """
    c_ = as_ctx(ctx)
    p = c_.p
    idx = np.asarray(idx, dtype=np.int64).reshape(-1)
    m = _nonzero_vector(idx // p, p)
    t = idx % p
    a, c = m[:, 0], m[:, 1]
    a_inv = c_.inv_array(a)
    c_inv = c_.inv_array(c)
    b0 = np.where(a != 0, 0, (-c_inv) % p)
    d0 = np.where(a != 0, a_inv, 0)
    return np.stack([a, (b0 + t * a) % p, c, (d0 + t * c) % p], axis=1)


def sl2_order(p: int) -> int:
    return p * (p * p - 1)


# -- sets of elements ---------------------------------------------------------

class MatrixSet:
    """A finite set of SL_2 or H_1 elements with canonical, duplicate-free storage."""

    __slots__ = ("ctx", "kind", "entries", "keys", "_symmetric")

    def __init__(self, ctx, kind: str, entries):
        if kind not in KINDS:
            raise ValueError(f"unknown group kind {kind!r}")
        self.ctx = as_ctx(ctx)
        self.kind = kind
        p = self.ctx.p
        if p > VECTOR_P_LIMIT:
            raise CapExceeded(f"p = {p} exceeds the vectorised limit {VECTOR_P_LIMIT}")
        width = 4 if kind == SL2 else 3
        arr = np.asarray(entries, dtype=np.int64).reshape(-1, width) % p
        if kind == SL2 and len(arr):
            det = (arr[:, 0] * arr[:, 3] - arr[:, 1] * arr[:, 2]) % p
            if np.any(det != 1):
                bad = arr[np.flatnonzero(det != 1)[0]]
                raise ValueError(f"matrix {tuple(int(v) for v in bad)} has determinant != 1")
        keys = sl2_keys(arr, p) if kind == SL2 else h1_keys(arr, p)
        self.keys = np.unique(keys)
        self.entries = decode_keys(self.keys, p, width)
        self._symmetric = None

    @classmethod
    def from_elements(cls, elems: Iterable, ctx=None, kind: str | None = None) -> "MatrixSet":
        elems = list(elems)
        if not elems:
            if ctx is None or kind is None:
                raise ValueError("ctx and kind are required for an empty set")
            return cls(ctx, kind, np.zeros((0, 4 if kind == SL2 else 3), dtype=np.int64))
        ps = {g.p for g in elems}
        if len(ps) != 1:
            raise MixedModulus(f"elements over several fields: {sorted(ps)}")
        p = ps.pop()
        if isinstance(elems[0], SL2Elem):
            return cls(ctx or p, SL2, [g.entries for g in elems])
        convs = {g.convention for g in elems}
        if len(convs) != 1:
            raise ConventionMismatch("mixed H1 conventions in one set")
        return cls(ctx or p, convs.pop(), [g.coords for g in elems])

    @property
    def p(self) -> int:
        return self.ctx.p

    def __len__(self) -> int:
        return len(self.keys)

    def __iter__(self) -> Iterator:
        p = self.p
        for row in self.entries:
            vals = [int(v) for v in row]
            if self.kind == SL2:
                yield SL2Elem(*vals, p)
            else:
                yield H1Elem(*vals, p, self.kind)

    def __contains__(self, g) -> bool:
        i = np.searchsorted(self.keys, g.key)
        return bool(i < len(self.keys) and self.keys[i] == g.key)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixSet):
            return NotImplemented
        return self.p == other.p and self.kind == other.kind and np.array_equal(self.keys, other.keys)

    def __hash__(self):
        return hash((self.p, self.kind, self.keys.tobytes()))

    def __repr__(self) -> str:
        return f"MatrixSet(p={self.p}, kind={self.kind}, n={len(self)})"

    def inverses(self) -> "MatrixSet":
        p = self.p
        if self.kind == SL2:
            return MatrixSet(self.ctx, SL2, sl2_inverse_entries(self.entries, p))
        if self.kind == H1_MATRIX:
            return MatrixSet(self.ctx, H1_MATRIX, h1_matrix_inverse_entries(self.entries, p))
        return MatrixSet(self.ctx, H1_SYMMETRIC, (-self.entries) % p)

    @property
    def symmetric(self) -> bool:
        """True when the set is closed under inversion (checked, then cached)."""
        if self._symmetric is None:
            self._symmetric = bool(np.array_equal(self.inverses().keys, self.keys))
        return self._symmetric

    def union(self, other: "MatrixSet") -> "MatrixSet":
        if self.p != other.p:
            raise MixedModulus("union of sets over different fields")
        if self.kind != other.kind:
            raise ConventionMismatch(f"union of {self.kind} and {other.kind}")
        return MatrixSet(self.ctx, self.kind, np.concatenate([self.entries, other.entries]))

    def subset(self, mask_or_idx) -> "MatrixSet":
        return MatrixSet(self.ctx, self.kind, self.entries[mask_or_idx])

    def left_mul(self, g: SL2Elem) -> "MatrixSet":
        """The coset g*S (SL_2 only)."""
        if self.kind != SL2:
            raise ConventionMismatch("left_mul is implemented for SL2 sets")
        return MatrixSet(self.ctx, SL2, sl2_product_entries(np.array([g.entries]), self.entries, self.p))

    def to_convention(self, convention: str) -> "MatrixSet":
        if self.kind == SL2:
            raise ConventionMismatch("SL2 sets have no H1 convention")
        return MatrixSet(self.ctx, convention,
                         h1_convert_entries(self.entries, self.p, self.kind, convention))


# -- enumeration and transporters ---------------------------------------------

def enumerate_sl2(ctx, cap: int = DEFAULT_ENUM_CAP) -> MatrixSet:
    """All p(p^2 - 1) elements of SL_2(F_p)."""
    c = as_ctx(ctx)
    if c.p > cap:
        raise CapExceeded(f"full enumeration of SL2(F_{c.p}) exceeds cap p <= {cap}")
    return MatrixSet(c, SL2, sl2_from_index(c, np.arange(sl2_order(c.p))))


def enumerate_h1(ctx, convention: str = H1_MATRIX, cap: int = 101) -> MatrixSet:
    c = as_ctx(ctx)
    if c.p > cap:
        raise CapExceeded(f"full enumeration of H1(F_{c.p}) exceeds cap p <= {cap}")
    return MatrixSet(c, convention, decode_keys(np.arange(c.p ** 3), c.p, 3))


def _column_completion(ctx: FieldCtx, m: Sequence[int]) -> tuple[int, int]:
    """A column n with det[m | n] = 1."""
    a, c = m[0] % ctx.p, m[1] % ctx.p
    if a:
        return (0, ctx.inv(a))
    if c:
        return ((-ctx.inv(c)) % ctx.p, 0)
    raise ZeroVector("zero vector has no completion")


def transporter_fiber(ctx, m: Sequence[int], m2: Sequence[int]) -> MatrixSet:
    """{T in SL_2 : T m = m2}; always exactly p elements for nonzero m, m2."""
    c = as_ctx(ctx)
    p = c.p
    if m[0] % p == 0 and m[1] % p == 0 or m2[0] % p == 0 and m2[1] % p == 0:
        raise ZeroVector("transporter fibres are defined for nonzero vectors")
    # T M has first column m2 where M = [m | n], det M = 1
    n = _column_completion(c, m)
    M_inv = SL2Elem.make(c, n[1], -n[0], -m[1], m[0])
    n2 = _column_completion(c, m2)
    t = np.arange(p, dtype=np.int64)
    cols = np.stack([np.full(p, m2[0] % p), (n2[0] + t * m2[0]) % p,
                     np.full(p, m2[1] % p), (n2[1] + t * m2[1]) % p], axis=1)
    return MatrixSet(c, SL2, sl2_product_entries(cols, np.array([M_inv.entries]), p))


def pair_transporter(ctx, x, y, u, v) -> SL2Elem | None:
    """The unique theta in SL_2 with theta x = u and theta y = v, if it exists.

    x and y must be linearly independent; theta exists exactly when the skew
    form takes the same value on (x, y) and (u, v).
    """
    c = as_ctx(ctx)
    p = c.p
    s = skew(c, x, y)
    if s == 0:
        raise DependentBasis(f"{tuple(x)} and {tuple(y)} lie on one line through the origin")
    if skew(c, u, v) != s:
        return None
    # theta = [u v] [x y]^{-1}; det [x y] = x1*y2 - x2*y1 = -s
    det_inv = c.inv(-s)
    xi = ((y[1] * det_inv) % p, (-y[0] * det_inv) % p, (-x[1] * det_inv) % p, (x[0] * det_inv) % p)
    a = (u[0] * xi[0] + v[0] * xi[2]) % p
    b = (u[0] * xi[1] + v[0] * xi[3]) % p
    cc = (u[1] * xi[0] + v[1] * xi[2]) % p
    d = (u[1] * xi[1] + v[1] * xi[3]) % p
    return SL2Elem(a, b, cc, d, p)


# -- coset intersections ------------------------------------------------------

@dataclass
class CosetReport:
    """Largest share of S inside one left coset of the checked subgroup families."""
    max_ratio: float
    family: str
    witness: dict
    bg_condition_holds: bool
    threshold: float
    exceptional_slack: float
    holds_with_slack: bool
    per_family: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "max_ratio": self.max_ratio,
            "family": self.family,
            "witness": self.witness,
            "bg_condition_holds": self.bg_condition_holds,
            "threshold": self.threshold,
            "exceptional_slack": self.exceptional_slack,
            "holds_with_slack": self.holds_with_slack,
            "per_family": self.per_family,
            "families_checked": ["borel", "split_torus_normalizer"],
        }


def _direction_images(S: MatrixSet, chunk: int = 4096) -> Iterator[np.ndarray]:
    """For each chunk of S, the image direction index of every direction, shape (n, p+1)."""
    p = S.p
    dirs = np.array([direction_vector(S.ctx, d) for d in range(p + 1)], dtype=np.int64)
    for s in range(0, len(S), chunk):
        imgs = sl2_apply(S.entries[s:s + chunk], dirs, p)
        yield direction_indices(S.ctx, imgs.reshape(-1, 2)).reshape(-1, p + 1)


def _count_max(keys_iter, size: int) -> tuple[int, int]:
    """(max count, arg key) over concatenated key chunks."""
    if size <= 4_000_000:
        hist = np.zeros(size, dtype=np.int64)
        for k in keys_iter:
            hist += np.bincount(k.ravel(), minlength=size)
        i = int(np.argmax(hist))
        return int(hist[i]), i
    uniq, counts = np.unique(np.concatenate([k.ravel() for k in keys_iter]), return_counts=True)
    i = int(np.argmax(counts))
    return int(counts[i]), int(uniq[i])


def max_coset_intersection(S: MatrixSet, gamma: float) -> CosetReport:
    """Max over checked subgroups H and g of |S cap gH| / |S|.

    Families: the p+1 Borel subgroups (stabilisers of a direction) and the
    normalisers of split tori (stabilisers of an unordered pair of directions).
    A left coset of the stabiliser of an object is the set of elements sending
    it to one fixed image, so the counts reduce to histograms of images.
    Exceptional subgroups (order <= 120) are covered by the slack 120/|S|.
    """
    if S.kind != SL2:
        raise ConventionMismatch("coset intersections are implemented for SL2 sets")
    p, n = S.p, len(S)
    threshold = p ** (-gamma / 2)
    if n == 0:
        return CosetReport(0.0, "none", {}, True, threshold, math.inf, False)
    q = p + 1
    ii, jj = np.triu_indices(q, k=1)

    borel_max, borel_arg = _count_max(
        (np.arange(q)[None, :] * q + img for img in _direction_images(S)), q * q)

    def pair_keys():
        for img in _direction_images(S):
            u, v = img[:, ii], img[:, jj]
            lo, hi = np.minimum(u, v), np.maximum(u, v)
            yield (ii * q + jj)[None, :] * (q * q) + lo * q + hi

    torus_max, torus_arg = _count_max(pair_keys(), q ** 4)

    per_family = {"borel": borel_max / n, "split_torus_normalizer": torus_max / n}
    if borel_max >= torus_max:
        family, ratio = "borel", borel_max / n
        witness = {"direction": borel_arg // q, "image_direction": borel_arg % q}
    else:
        family, ratio = "split_torus_normalizer", torus_max / n
        src, dst = divmod(torus_arg, q * q)
        witness = {"directions": list(divmod(src, q)), "image_directions": list(divmod(dst, q))}
    slack = EXCEPTIONAL_ORDER / n
    return CosetReport(
        max_ratio=ratio,
        family=family,
        witness=witness,
        bg_condition_holds=ratio < threshold,
        threshold=threshold,
        exceptional_slack=slack,
        holds_with_slack=max(ratio, slack) < threshold,
        per_family=per_family,
    )


# -- file format --------------------------------------------------------------

def loads_matrix_set(text: str) -> MatrixSet:
    header, body = read_header(text)
    try:
        p, kind = int(header["p"]), header["group"]
    except (KeyError, ValueError):
        raise ParseError("header must read 'p=<prime> group=<sl2|h1-matrix|h1-symmetric>'") from None
    if kind not in KINDS:
        raise ParseError(f"unknown group {kind!r}")
    width = 4 if kind == SL2 else 3
    rows = [parse_residues(ln, p, width, i) for i, ln in body]
    try:
        return MatrixSet(field_new(p), kind, np.array(rows, dtype=np.int64).reshape(-1, width))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def dumps_matrix_set(S: MatrixSet) -> str:
    rows = [f"p={S.p} group={S.kind}"]
    rows += [",".join(str(int(v)) for v in row) for row in S.entries]
    return "\n".join(rows) + "\n"


def read_matrix_set(path) -> MatrixSet:
    return loads_matrix_set(Path(path).read_text(encoding="utf-8"))


def write_matrix_set(S: MatrixSet, path) -> None:
    Path(path).write_text(dumps_matrix_set(S), encoding="utf-8")
