"""Deterministic extremal and sharpness configurations.

Every generator returns a ``NamedConfig`` whose expected statistics are
recomputed from the generated sets before it is handed back.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import InfeasibleFiber, NotADivisor, NotOriginLine
from .fp_core import Line, PointSet, as_ctx, direction_stats, direction_vector
from .groups import (
    H1_MATRIX,
    SL2,
    MatrixSet,
    enumerate_h1,
    enumerate_sl2,
    transporter_fiber,
)
from .packing import image_set


def _prime_factors(n: int) -> list[int]:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def primitive_root(ctx) -> int:
    p = as_ctx(ctx).p
    qs = _prime_factors(p - 1)
    for g in range(2 if p > 2 else 1, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    return 1


def mult_subgroup(ctx, d: int) -> list[int]:
    """The subgroup of F_p^* of order d, sorted."""
    p = as_ctx(ctx).p
    if d < 1 or (p - 1) % d:
        raise NotADivisor(f"{d} does not divide p - 1 = {p - 1}")
    h = pow(primitive_root(p), (p - 1) // d, p)
    return sorted({pow(h, i, p) for i in range(d)})


# -- configs ------------------------------------------------------------------

@dataclass
class Expectation:
    value: float
    relation: str = "=="  # or "<="
    source: str = ""


@dataclass
class NamedConfig:
    id: str
    p: int
    sets: dict[str, Any]
    expected: dict[str, Expectation]
    actual: dict[str, float] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def failures(self) -> list[str]:
        bad = []
        for name, exp in self.expected.items():
            got = self.actual.get(name)
            ok = got == exp.value if exp.relation == "==" else got is not None and got <= exp.value + 1e-9
            if not ok:
                bad.append(f"{name}: got {got}, expected {exp.relation} {exp.value}")
        return bad

    def verified(self) -> "NamedConfig":
        bad = self.failures()
        if bad:
            raise RuntimeError(f"{self.id} failed self-check: " + "; ".join(bad))
        return self

    def manifest(self) -> dict:
        return {"id": self.id, "p": self.p,
                "sets": {k: {"size": len(v), "kind": getattr(v, "kind", f"points{getattr(v, 'dim', '')}")}
                         for k, v in self.sets.items()},
                "expected": {k: {"value": e.value, "relation": e.relation, "source": e.source}
                             for k, e in self.expected.items()},
                "actual": self.actual, "notes": self.notes}


def _union(ctx, parts: Iterable[MatrixSet], kind: str = SL2) -> MatrixSet:
    rows = [m.entries for m in parts if len(m)]
    if not rows:
        return MatrixSet(ctx, kind, np.zeros((0, 4 if kind == SL2 else 3), dtype=np.int64))
    return MatrixSet(ctx, kind, np.concatenate(rows))


def obs1_config(p: int, dA: int, dB: int) -> NamedConfig:
    """E = {0} x A and S built from |B| maps (0,1) -> (0,x') per coset of A in B."""
    ctx = as_ctx(p)
    A = mult_subgroup(ctx, dA)
    B = mult_subgroup(ctx, dB)
    if dB % dA:
        raise NotADivisor(f"subgroup order {dA} does not divide {dB}")
    if dB > p:
        raise InfeasibleFiber(f"fibres have size {p} < |B| = {dB}")
    reps, seen = [], set()
    for b in B:
        if b not in seen:
            reps.append(b)
            seen.update(b * a % p for a in A)
    parts = []
    for x in reps:
        fiber = transporter_fiber(ctx, (0, 1), (0, x))
        parts.append(fiber.subset(np.arange(dB)))  # storage order is lexicographic
    S = _union(ctx, parts)
    E = PointSet(ctx, [(0, a) for a in A])
    img = image_set(S, E)
    cfg = NamedConfig("obs1", p, {"S": S, "E": E, "S(E)": img}, {
        "|S|": Expectation(dB * (dB // dA), source="|B||B/A|"),
        "|E|": Expectation(dA, source="|A|"),
        "|S(E)|": Expectation(dB, source="|B|"),
        "|S(E)|^2": Expectation(len(S) * len(E), source="|S||E|"),
    }, {"|S|": len(S), "|E|": len(E), "|S(E)|": len(img), "|S(E)|^2": len(img) ** 2})
    cfg.notes.append(f"A = {A}, B = {B}, coset representatives {reps}")
    return cfg.verified()


def obs2_config(p: int, num_lines: int) -> NamedConfig:
    """E the line y = 0; S every theta sending (1,0) into E', a union of origin lines."""
    ctx = as_ctx(p)
    if not 1 <= num_lines <= p + 1:
        raise ValueError(f"num_lines must be in [1, {p + 1}]")
    dirs = [direction_vector(ctx, d) for d in range(num_lines)]
    targets = sorted({(t * u % p, t * v % p) for (u, v) in dirs for t in range(1, p)})
    S = _union(ctx, [transporter_fiber(ctx, (1, 0), m) for m in targets])
    E = PointSet(ctx, [(x, 0) for x in range(p)])
    E_prime = PointSet(ctx, targets + [(0, 0)])
    img = image_set(S, E)
    cfg = NamedConfig("obs2", p, {"S": S, "E": E, "E'": E_prime, "S(E)": img}, {
        "|E'|": Expectation(num_lines * (p - 1) + 1, source="num_lines (p-1) + 1"),
        "|S|": Expectation(p * num_lines * (p - 1), source="p |E' - 0|, fibres are disjoint"),
        "|S(E)|": Expectation(len(E_prime), source="|E'|"),
        "S(E) = E'": Expectation(1),
    }, {"|E'|": len(E_prime), "|S|": len(S), "|S(E)|": len(img), "S(E) = E'": int(img == E_prime)})
    cfg.notes.append(f"realised eps = log_p(num_lines) = {math.log(num_lines) / math.log(p):.4f}")
    return cfg.verified()


def _origin_direction(ctx, ell) -> tuple[int, int]:
    if isinstance(ell, Line):
        if not ell.through_origin:
            raise NotOriginLine(f"{ell} does not pass through the origin")
        return (ell.b % ctx.p, (-ell.a) % ctx.p)
    v = tuple(int(t) % ctx.p for t in ell)
    if v == (0, 0):
        raise NotOriginLine("the zero vector spans no line")
    return v


def line_transporter(ctx, ell1, ell2) -> MatrixSet:
    """All theta in SL2 with theta(ell1) = ell2, for origin lines given as a
    direction vector or an origin ``Line``.  Size p(p - 1)."""
    c = as_ctx(ctx)
    p = c.p
    d1 = _origin_direction(c, ell1)
    u, v = _origin_direction(c, ell2)
    return _union(c, [transporter_fiber(c, d1, (t * u % p, t * v % p)) for t in range(1, p)])


def energy_extremal_family(ctx) -> MatrixSet:
    """The (p-1)^2 matrices (s, -x; 1/x, 0) with s, x nonzero."""
    c = as_ctx(ctx)
    p = c.p
    rows = [(s, (-x) % p, c.inv(x), 0) for x in range(1, p) for s in range(1, p)]
    return MatrixSet(c, SL2, np.array(rows, dtype=np.int64))


def prop11_sharpness(p: int, d: int) -> NamedConfig:
    """S maps (0,1) into {(-x, 0) : x in A}; E = A x F_p; S(E) stays inside F_p x A."""
    ctx = as_ctx(p)
    A = mult_subgroup(ctx, d)
    S = _union(ctx, [transporter_fiber(ctx, (0, 1), ((-x) % p, 0)) for x in A])
    E = PointSet(ctx, [(y, t) for y in A for t in range(p)])
    img = image_set(S, E)
    inside = bool(np.isin(img.pts[:, 1], A).all())
    cfg = NamedConfig("prop11", p, {"S": S, "E": E, "S(E)": img}, {
        "|S|": Expectation(d * p, source="d p"),
        "|E|": Expectation(d * p, source="d p"),
        "|S(E)|": Expectation(d * p, "<=", source="second coordinate stays in A"),
        "S(E) in F_p x A": Expectation(1),
    }, {"|S|": len(S), "|E|": len(E), "|S(E)|": len(img), "S(E) in F_p x A": int(inside)})
    return cfg.verified()


def prop13_extremal(p: int, num_dirs: int | None = None) -> NamedConfig:
    """One nonzero point on each of the first ``num_dirs`` origin lines; S = SL2."""
    ctx = as_ctx(p)
    n = p + 1 if num_dirs is None else num_dirs
    if not 1 <= n <= p + 1:
        raise ValueError(f"num_dirs must be in [1, {p + 1}]")
    E = PointSet(ctx, [direction_vector(ctx, d) for d in range(n)])
    S = enumerate_sl2(ctx, cap=max(p, 31))
    img = image_set(S, E)
    st = direction_stats(E)
    cfg = NamedConfig("prop13", p, {"S": S, "E": E, "S(E)": img}, {
        "|E|": Expectation(n), "k1": Expectation(1), "k2": Expectation(n),
        "|S(E)|": Expectation(p * p - 1, source="SL2 is transitive on nonzero vectors"),
    }, {"|E|": len(E), "k1": st.k1, "k2": st.k2, "|S(E)|": len(img)})
    return cfg.verified()


def obs3_config(p: int, T: Sequence[int]) -> NamedConfig:
    """X = H1, E = F_p^2 x T."""
    ctx = as_ctx(p)
    T = sorted({int(t) % p for t in T})
    X = enumerate_h1(ctx, H1_MATRIX, cap=max(p, 101))
    E = PointSet(ctx, [(x, y, z) for x in range(p) for y in range(p) for z in T], dim=3)
    img = image_set(X, E)
    rel = "==" if 0 not in T else "<="
    cfg = NamedConfig("obs3", p, {"X": X, "E": E, "X(E)": img}, {
        "|X(E)|": Expectation(p * p * len(T), rel, source="alpha p^3 with alpha = |T|/p"),
        "third coordinates": Expectation(len(T)),
    }, {"|X(E)|": len(img), "third coordinates": len(img.third_coordinates())})
    return cfg.verified()


def obs4_config(p: int, A: Sequence[int]) -> NamedConfig:
    """X = {[a, b, c] : b in A}, E = F_p x A x A."""
    ctx = as_ctx(p)
    A = sorted({int(a) % p for a in A})
    rows = [(a, b, c) for a in range(p) for b in A for c in range(p)]
    X = MatrixSet(ctx, H1_MATRIX, np.array(rows, dtype=np.int64).reshape(-1, 3))
    E = PointSet(ctx, [(x, y, z) for x in range(p) for y in A for z in A], dim=3)
    img = image_set(X, E)
    cfg = NamedConfig("obs4", p, {"X": X, "E": E, "X(E)": img}, {
        "|X|": Expectation(p * p * len(A)), "|E|": Expectation(p * len(A) ** 2),
        "|X(E)|": Expectation(len(X), "<=", source="|X(E)| <= p^2 |A| = |X|"),
    }, {"|X|": len(X), "|E|": len(E), "|X(E)|": len(img)})
    return cfg.verified()


def obs5_config(p: int, A: Sequence[int]) -> NamedConfig:
    """X = {[a, 1, c]}, E = F_p x A x A with A an arithmetic progression; full fibres."""
    ctx = as_ctx(p)
    A = sorted({int(a) % p for a in A})
    rows = [(a, 1, c) for a in range(p) for c in range(p)]
    X = MatrixSet(ctx, H1_MATRIX, np.array(rows, dtype=np.int64))
    E = PointSet(ctx, [(x, y, z) for x in range(p) for y in A for z in A], dim=3)
    img = image_set(X, E)
    cfg = NamedConfig("obs5", p, {"X": X, "E": E, "X(E)": img}, {
        "|X(E)|": Expectation(2 * len(E), "<=", source="second coordinate lies in A + A"),
    }, {"|X(E)|": len(img), "C = |X(E)|/|E|": len(img) / len(E)})
    return cfg.verified()


CONSTRUCTIONS = {
    "obs1": obs1_config, "obs2": obs2_config, "prop11": prop11_sharpness,
    "prop13": prop13_extremal, "obs3": obs3_config, "obs4": obs4_config, "obs5": obs5_config,
}
