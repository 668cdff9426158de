"""Dense complex Fourier transform on F_p^n with chi(t) = exp(2*pi*i*t/p).

    fhat(m) = p^{-n} sum_x chi(-m.x) f(x),      f(x) = sum_m chi(m.x) fhat(m).

The transform is applied one axis at a time with the p x p character matrix,
which is the defining sum reorganised (the character of m.x factors over
coordinates), not a fast transform.  Used only as a numerical cross-check of
the exact counts.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapExceeded, DimensionMismatch
from .fp_core import PointSet, as_ctx, same_ctx
from .groups import SL2, MatrixSet

FOURIER_P_CAP = 13


@dataclass
class FpFunction:
    p: int
    n: int
    table: np.ndarray

    def __post_init__(self):
        self.table = np.asarray(self.table, dtype=np.complex128)
        if self.table.shape != (self.p,) * self.n:
            raise DimensionMismatch(f"table shape {self.table.shape} != {(self.p,) * self.n}")

    @classmethod
    def zeros(cls, p: int, n: int) -> "FpFunction":
        return cls(p, n, np.zeros((p,) * n, dtype=np.complex128))

    @classmethod
    def indicator(cls, E: PointSet) -> "FpFunction":
        f = cls.zeros(E.p, E.dim)
        f.table[tuple(E.pts.T)] = 1.0
        return f

    def __call__(self, *x: int) -> complex:
        return complex(self.table[tuple(v % self.p for v in x)])

    def l2sq(self) -> float:
        return float(np.sum(np.abs(self.table) ** 2))


def character_matrix(p: int, sign: int) -> np.ndarray:
    """C[m, x] = chi(sign * m * x)."""
    m = np.arange(p)
    return np.exp(sign * 2j * np.pi * (np.outer(m, m) % p) / p)


def _apply_each_axis(table: np.ndarray, C: np.ndarray) -> np.ndarray:
    out = table
    for axis in range(table.ndim):
        out = np.moveaxis(np.tensordot(C, out, axes=([1], [axis])), 0, axis)
    return out


def dft(f: FpFunction) -> FpFunction:
    C = character_matrix(f.p, -1)
    return FpFunction(f.p, f.n, _apply_each_axis(f.table, C) / f.p ** f.n)


def idft(fhat: FpFunction) -> FpFunction:
    C = character_matrix(fhat.p, +1)
    return FpFunction(fhat.p, fhat.n, _apply_each_axis(fhat.table, C))


def pair_indicator(A: PointSet, B: PointSet) -> FpFunction:
    """Indicator of A x B as a function on F_p^4, indexed (x1, x2, y1, y2)."""
    same_ctx(A, B)
    p = A.p
    t = np.zeros((p,) * 4, dtype=np.complex128)
    if len(A) and len(B):
        a = np.zeros((p, p))
        b = np.zeros((p, p))
        a[tuple(A.pts.T)] = 1.0
        b[tuple(B.pts.T)] = 1.0
        t = np.einsum("ij,kl->ijkl", a, b).astype(np.complex128)
    return FpFunction(p, 4, t)


def incidence_via_fourier(A: PointSet, B: PointSet, S: MatrixSet, cap: int = FOURIER_P_CAP) -> float:
    """|P||S|/p^2 + p^2 * sum_{m != 0} sum_{theta in S} Phat(-m, theta^T m), for P = A x B."""
    ctx = same_ctx(A, B, S)
    p = ctx.p
    if p > cap:
        raise CapExceeded(f"Fourier reconstruction is capped at p <= {cap}")
    if S.kind != SL2:
        raise DimensionMismatch("incidence_via_fourier expects an SL2 set")
    Phat = dft(pair_indicator(A, B)).table
    m = np.array([(i, j) for i in range(p) for j in range(p) if (i, j) != (0, 0)], dtype=np.int64)
    e = S.entries
    # theta^T m for theta = (a b; c d): (a m1 + c m2, b m1 + d m2)
    tm1 = (e[:, None, 0] * m[None, :, 0] + e[:, None, 2] * m[None, :, 1]) % p
    tm2 = (e[:, None, 1] * m[None, :, 0] + e[:, None, 3] * m[None, :, 1]) % p
    neg = (-m) % p
    vals = Phat[neg[None, :, 0], neg[None, :, 1], tm1, tm2]
    total = len(A) * len(B) * len(S) / p ** 2 + p ** 2 * vals.sum()
    return float(total.real)
