"""Incidences and quadruple counts for the Heisenberg group H_1(F_p).

Group elements act in the matrix convention: [a, b, c] sends (X, Y, Z) to
(X + aY + cZ, Y + bZ, Z).  The third coordinate is never changed, so most
counts split into blocks by third coordinate.
"""
from __future__ import annotations

import math
from typing import Any, Iterator

import numpy as np

from .errors import DimensionMismatch, HypothesisViolated, MissingParam, PreconditionViolated
from .fp_core import PointSet, as_ctx, fiber_stats, same_ctx
from .groups import H1_MATRIX, H1Elem, MatrixSet, h1_apply_codes
from .incidence_sl2 import BoundReport, WeightedSet, check, finalize

_CHUNK_CELLS = 1 << 22


def _matrix_form(X: MatrixSet) -> MatrixSet:
    if X.kind == H1_MATRIX:
        return X
    if X.kind.startswith("h1"):
        return X.to_convention(H1_MATRIX)
    raise DimensionMismatch(f"expected an H1 set, got {X.kind}")


def _need_dim3(*sets: PointSet):
    for E in sets:
        if E.dim != 3:
            raise DimensionMismatch("H1 acts on F_p^3")


# -- incidences ---------------------------------------------------------------

def count_incidences_h1(A: PointSet, B: PointSet, X: MatrixSet) -> int:
    """|{(x, y, theta) in A x B x X : theta y = x}|."""
    same_ctx(A, B, X)
    _need_dim3(A, B)
    X = _matrix_form(X)
    if not (len(A) and len(B) and len(X)):
        return 0
    inA = A.bitmap()
    step = max(1, _CHUNK_CELLS // len(B))
    total = 0
    for s in range(0, len(X), step):
        total += int(np.count_nonzero(inA[h1_apply_codes(X.entries[s:s + step], B.pts, A.p)]))
    return total


def count_incidences_h1_naive(A: PointSet, B: PointSet, X: MatrixSet) -> int:
    same_ctx(A, B, X)
    X = _matrix_form(X)
    a_pts = list(A)
    total = 0
    for theta in X:
        for y in B:
            image = theta(y)
            total += sum(1 for x in a_pts if x == image)
    return total


def image_size_h1(X: MatrixSet, E: PointSet) -> int:
    """|X(E)| computed with a presence bitmap."""
    same_ctx(X, E)
    _need_dim3(E)
    X = _matrix_form(X)
    p = E.p
    hit = np.zeros(p ** 3, dtype=bool)
    if not (len(X) and len(E)):
        return 0
    step = max(1, _CHUNK_CELLS // len(E))
    for s in range(0, len(X), step):
        hit[h1_apply_codes(X.entries[s:s + step], E.pts, p).ravel()] = True
    return int(np.count_nonzero(hit))


# -- the two-point transporter ------------------------------------------------

def transporter_count_h1(ctx, src1, dst1, src2, dst2) -> tuple[int, Iterator[H1Elem]]:
    """Number of theta with theta(src1) = dst1 and theta(src2) = dst2, and the solutions.

    Needs nonzero third coordinates z, w that match between source and
    target, and y w' + z v' = y' w + z' v.  The count is 1, p or 0.
    """
    c_ = as_ctx(ctx)
    p = c_.p
    x, y, z = (int(t) % p for t in src1)
    x2, y2, z2 = (int(t) % p for t in dst1)
    u, v, w = (int(t) % p for t in src2)
    u2, v2, w2 = (int(t) % p for t in dst2)
    if z == 0 or w == 0:
        raise HypothesisViolated("third coordinates must be nonzero")
    if z != z2 or w != w2:
        raise HypothesisViolated("third coordinates of source and target differ")
    if (y * w2 + z * v2 - y2 * w - z2 * v) % p:
        raise HypothesisViolated("y w' + z v' != y' w + z' v")
    b = (v2 - v) * c_.inv(w) % p
    det = (v * z - w * y) % p
    rhs = (z * (u2 - u) + w * (x - x2)) % p
    iz = c_.inv(z)

    def solution(a):
        c = (x2 - x - a * y) * iz % p
        return H1Elem(a % p, b, c, p, H1_MATRIX)

    if det:
        a = rhs * c_.inv(det) % p
        return 1, iter([solution(a)])
    if rhs == 0:
        return p, (solution(a) for a in range(p))
    return 0, iter(())


# -- quadruple counts ---------------------------------------------------------

def _blocks(E: PointSet) -> dict[int, np.ndarray]:
    z = E.pts[:, 2]
    return {int(lam): E.pts[z == lam] for lam in np.unique(z)}


def _pair_values(P: np.ndarray, Q: np.ndarray, lam: int, beta: int, col: int, p: int) -> np.ndarray:
    """beta * P[:, col] - lam * Q[:, col] over all pairs, flattened."""
    return ((beta * P[:, None, col] - lam * Q[None, :, col]) % p).ravel()


def count_N(A: PointSet, B: PointSet) -> int:
    """Quadruples (x,y,z) in A, (x',y',z') in B, (u,v,w) in A, (u',v',w') in B with
    y w' + z v' = y' w + v z', z = z', w = w'.

    With z = lam and w = beta the first equation reads
    beta*y - lam*v = beta*y' - lam*v', so each block is a histogram match.
    """
    ctx = same_ctx(A, B)
    _need_dim3(A, B)
    p = ctx.p
    Ab, Bb = _blocks(A), _blocks(B)
    total = 0
    for lam in Ab.keys() & Bb.keys():
        for beta in Ab.keys() & Bb.keys():
            hA = np.bincount(_pair_values(Ab[lam], Ab[beta], lam, beta, 1, p), minlength=p)
            hB = np.bincount(_pair_values(Bb[lam], Bb[beta], lam, beta, 1, p), minlength=p)
            total += int(np.dot(hA, hB))
    return total


def count_N_naive(A: PointSet, B: PointSet) -> int:
    ctx = same_ctx(A, B)
    p = ctx.p
    a = A.pts[:, None, None, None, :]
    b = B.pts[None, :, None, None, :]
    a2 = A.pts[None, None, :, None, :]
    b2 = B.pts[None, None, None, :, :]
    x, y, z = a[..., 0], a[..., 1], a[..., 2]
    y1, z1 = b[..., 1], b[..., 2]
    v, w = a2[..., 1], a2[..., 2]
    v1, w1 = b2[..., 1], b2[..., 2]
    ok = ((y * w1 + z * v1 - y1 * w - v * z1) % p == 0) & (z == z1) & (w == w1)
    return int(np.count_nonzero(ok))


def count_Nprime(A: PointSet, B: PointSet) -> int:
    """Quadruples (x,y,z) in B, (x',y',z') in A, (u,v,w) in B, (u',v',w') in A with
    y w' + z v' = y' w + v z', v z - w y = 0, z u' + x w' - z' u - x' w = 0,
    w = w', z = z'.

    Per block (lam, beta): the B-pair needs beta*y - lam*v = 0, the A-pair
    needs beta*y' - lam*v' = 0, and beta*x - lam*u must agree across the two.
    """
    ctx = same_ctx(A, B)
    _need_dim3(A, B)
    p = ctx.p
    Ab, Bb = _blocks(A), _blocks(B)
    total = 0
    for lam in Ab.keys() & Bb.keys():
        for beta in Ab.keys() & Bb.keys():
            sides = []
            for blk in (Bb, Ab):
                e1 = _pair_values(blk[lam], blk[beta], lam, beta, 1, p)
                e3 = _pair_values(blk[lam], blk[beta], lam, beta, 0, p)
                sides.append(np.bincount(e3[e1 == 0], minlength=p))
            total += int(np.dot(sides[0], sides[1]))
    return total


def count_Nprime_naive(A: PointSet, B: PointSet) -> int:
    ctx = same_ctx(A, B)
    p = ctx.p
    q1 = B.pts[:, None, None, None, :]
    q2 = A.pts[None, :, None, None, :]
    q3 = B.pts[None, None, :, None, :]
    q4 = A.pts[None, None, None, :, :]
    x, y, z = q1[..., 0], q1[..., 1], q1[..., 2]
    x1, y1, z1 = q2[..., 0], q2[..., 1], q2[..., 2]
    u, v, w = q3[..., 0], q3[..., 1], q3[..., 2]
    u1, v1, w1 = q4[..., 0], q4[..., 1], q4[..., 2]
    ok = ((y * w1 + z * v1 - y1 * w - v * z1) % p == 0)
    ok &= (v * z - w * y) % p == 0
    ok &= (z * u1 + x * w1 - z1 * u - x1 * w) % p == 0
    ok &= (w == w1) & (z == z1)
    return int(np.count_nonzero(ok))


# -- weighted orthogonality ---------------------------------------------------

def _weighted_arrays(W: WeightedSet, p: int) -> tuple[np.ndarray, np.ndarray]:
    keys = list(W)
    pts = np.array(keys, dtype=np.int64).reshape(-1, 4) % p
    return pts, np.array([W[k] for k in keys], dtype=np.int64)


def orthogonal_mass(U: WeightedSet, V: WeightedSet, ctx) -> int:
    """M = sum of F(u) G(v) over u in U, v in V with u . v = 0."""
    p = as_ctx(ctx).p
    if not len(U) or not len(V):
        return 0
    Pu, F = _weighted_arrays(U, p)
    Pv, G = _weighted_arrays(V, p)
    zero = (Pu @ Pv.T) % p == 0
    return int(F @ zero.astype(np.int64) @ G)


def orthogonal_mass_naive(U: WeightedSet, V: WeightedSet, ctx) -> int:
    p = as_ctx(ctx).p
    total = 0
    for u, fu in U.items():
        for v, gv in V.items():
            if sum(a * b for a, b in zip(u, v)) % p == 0:
                total += fu * gv
    return total


def weighted_orthogonal_count(U: WeightedSet, V: WeightedSet, ctx) -> BoundReport:
    p = as_ctx(ctx).p
    exact = orthogonal_mass(U, V, p)
    main = U.total * V.total / p
    terms = [("p^2 sqrt(ΣF^2) sqrt(ΣG^2)", p * p * math.sqrt(U.sq * V.sq))]
    return finalize("lem-5.5", "two_sided", p, exact, main, terms,
                    sizes={"U": len(U), "V": len(V)},
                    params={"sum_F": U.total, "sum_G": V.total, "sum_F2": U.sq, "sum_G2": V.sq})


# -- bound evaluation ---------------------------------------------------------

H1_THEOREMS = ("thm-5.1", "prop-5.2", "prop-5.3", "thm-1.5")


def _reject_zero_third(tid: str, *sets: PointSet):
    for E in sets:
        if len(E) and np.any(E.pts[:, 2] == 0):
            raise PreconditionViolated(f"{tid} needs every third coordinate nonzero")


def evaluate_bound_h1(theorem_id: str, **inputs) -> BoundReport:
    """Exact count next to the H1-side bound formula.

    Inputs: A, B (PointSet in F_p^3), X (H1 MatrixSet), E (for thm-1.5),
    and optionally eps.  eps defaults to the exponent read off the largest
    (y, z)-fibre.
    """
    tid = theorem_id
    needs = {"thm-5.1": "ABX", "prop-5.2": "AB", "prop-5.3": "AB", "thm-1.5": "XE"}
    if tid not in needs:
        raise KeyError(f"unknown theorem id {theorem_id!r}")
    for ch in needs[tid]:
        if inputs.get(ch) is None:
            raise MissingParam(f"{tid} needs input {ch!r}")
    eps_in = inputs.get("eps")
    A, B, X, E = (inputs.get(k) for k in "ABXE")
    params: dict[str, Any] = {}
    notes: list[str] = []

    if tid == "thm-5.1":
        ctx = same_ctx(A, B, X)
        _need_dim3(A, B)
        _reject_zero_third(tid, A, B)
        p = ctx.p
        mB, epsB = fiber_stats(B)
        mA, epsA = fiber_stats(A)
        eps = epsB if eps_in is None else float(eps_in)
        params.update(eps=eps, max_fiber_A=mA, max_fiber_B=mB, eps_A=epsA, eps_B=epsB)
        pre = [check("third coordinates nonzero", True),
               check("fibres of B <= p^(1-eps)", mB <= p ** (1 - eps) + 1e-9, f"max fibre {mB}")]
        a, b, x = len(A), len(B), len(X)
        exact = count_incidences_h1(A, B, X)
        terms = [("p^((3-eps)/2)|P|^(1/2)|X|^(1/2)", p ** ((3 - eps) / 2) * math.sqrt(a * b * x))]
        return finalize(tid, "two_sided", p, exact, a * b * x / p ** 3, terms,
                        sizes={"A": a, "B": b, "X": x, "P": a * b}, params=params, pre=pre)

    if tid in ("prop-5.2", "prop-5.3"):
        ctx = same_ctx(A, B)
        _need_dim3(A, B)
        p = ctx.p
        a, b = len(A), len(B)
        sizes = {"A": a, "B": b}
        if tid == "prop-5.3":
            exact = count_Nprime(A, B)
            # the cap solves for v and x' by dividing by z and w
            nz = not any(len(E) and np.any(E.pts[:, 2] == 0) for E in (A, B))
            pre = [check("third coordinates nonzero", nz)]
            return finalize(tid, "upper", p, exact, 0.0, [("p|A||B|", float(p * a * b))], sizes=sizes, pre=pre)
        mA, epsA = fiber_stats(A)
        mB, epsB = fiber_stats(B)
        eps = min(epsA, epsB) if eps_in is None else float(eps_in)
        params.update(eps=eps, max_fiber_A=mA, max_fiber_B=mB, eps_A=epsA, eps_B=epsB)
        pre = [check("fibres of A and B <= p^(1-eps)", max(mA, mB) <= p ** (1 - eps) + 1e-9,
                     f"max fibres {mA}, {mB}")]
        exact = count_N(A, B)
        terms = [("p^(3-2eps)|A||B|", p ** (3 - 2 * eps) * a * b)]
        return finalize(tid, "upper_main", p, exact, a * a * b * b / p, terms,
                        sizes=sizes, params=params, pre=pre)

    # thm-1.5
    ctx = same_ctx(X, E)
    _need_dim3(E)
    _reject_zero_third(tid, E)
    p = ctx.p
    mE, epsE = fiber_stats(E)
    eps = epsE if eps_in is None else float(eps_in)
    params.update(eps=eps, max_fiber_E=mE)
    x, e = len(X), len(E)
    exact = image_size_h1(X, E)
    main = min(p ** 3, x * e / p ** (3 - eps / 2))
    pre = [check("E avoids F_p^2 x {0}", True),
           check("fibres of E <= p^(1-eps)", mE <= p ** (1 - eps) + 1e-9, f"max fibre {mE}")]
    return finalize(tid, "lower", p, exact, main, [], sizes={"X": x, "E": e},
                    params=params, pre=pre, notes=notes)
