"""Images S(E) = {f(x) : f in S, x in E} and the lower bounds they are compared against."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptySet, MissingParam
from .fp_core import PointSet, direction_indices, direction_stats, fiber_stats, same_ctx
from .groups import H1_MATRIX, SL2, MatrixSet, h1_apply_codes, sl2_apply_codes
from .incidence_sl2 import check

_CHUNK_CELLS = 1 << 22


def image_set(S: MatrixSet, E: PointSet) -> PointSet:
    """Union of f(E) over f in S, deduplicated through a bitmap of F_p^n."""
    ctx = same_ctx(S, E)
    p = ctx.p
    if S.kind == SL2:
        if E.dim != 2:
            raise DimensionMismatch("SL2 acts on F_p^2")
        apply = sl2_apply_codes
        entries = S.entries
    else:
        if E.dim != 3:
            raise DimensionMismatch("H1 acts on F_p^3")
        apply = h1_apply_codes
        entries = S.to_convention(H1_MATRIX).entries if S.kind != H1_MATRIX else S.entries
    hit = np.zeros(p ** E.dim, dtype=bool)
    if len(S) and len(E):
        step = max(1, _CHUNK_CELLS // len(E))
        for s in range(0, len(entries), step):
            hit[apply(entries[s:s + step], E.pts, p).ravel()] = True
    return PointSet.from_bitmap(ctx, hit, E.dim)


def translate(E: PointSet, x: Sequence[int]) -> PointSet:
    """E - x."""
    shift = np.asarray(x, dtype=np.int64).reshape(1, -1)
    if shift.shape[1] != E.dim:
        raise DimensionMismatch(f"cannot translate a set in F_p^{E.dim} by {tuple(x)}")
    return PointSet(E.ctx, (E.pts - shift) % E.p, E.dim)


def rich_counts(E: PointSet) -> np.ndarray:
    """For each point x of E, the number of lines through x meeting E outside x."""
    if E.dim != 2:
        raise DimensionMismatch("rich points are defined in F_p^2")
    p = E.p
    out = np.zeros(len(E), dtype=np.int64)
    for i, x in enumerate(E.pts):
        d = direction_indices(E.ctx, (E.pts - x) % p)
        out[i] = len(np.unique(d[d >= 0]))
    return out


def find_rich_point(E: PointSet) -> tuple[tuple[int, int], int]:
    """A point of E lying on the most lines that contain another point of E.

    Once |E| >= 4p such a point sees at least p/2 lines.
    """
    if len(E) == 0:
        raise EmptySet("no rich point in an empty set")
    counts = rich_counts(E)
    i = int(np.argmax(counts))
    best = int(counts[i])
    if len(E) >= 4 * E.p:
        assert best >= E.p / 2, f"rich-point guarantee failed: {best} < {E.p / 2}"
    return tuple(int(v) for v in E.pts[i]), best


# -- predicted lower bounds ---------------------------------------------------

PACKING_THEOREMS: dict[str, dict[str, Any]] = {
    "prop-1.1": {"needs": ("p", "S", "E"), "log": False},
    "thm-1.2": {"needs": ("p", "S", "E", "k"), "log": False},
    "prop-1.3": {"needs": ("p", "S", "E", "k1", "k2"), "log": True},
    "thm-1.4": {"needs": ("p", "S", "E", "k1", "k2"), "log": True},
    "thm-1.5": {"needs": ("p", "X", "E"), "log": False},
    "thm-4.2a": {"needs": ("p",), "log": False},
    "thm-4.2b": {"needs": ("p", "S", "E", "k"), "log": False},
    "rmk-4.4": {"needs": ("p", "S", "E", "k1"), "log": True},
}


def predicted_lower_bound(theorem_id: str, params: dict) -> float:
    """Formula value with implied constant 1.  For the ≳ statements the
    log2(p) loss is divided out, so the prediction is the weaker reading.

    ``params`` holds sizes under "S", "E", "X" and the parameters p, k, k1,
    k2, eps (eps defaults to 0).
    """
    if theorem_id not in PACKING_THEOREMS:
        raise KeyError(f"unknown packing theorem {theorem_id!r}")
    meta = PACKING_THEOREMS[theorem_id]
    for name in meta["needs"]:
        if params.get(name) is None:
            raise MissingParam(f"{theorem_id} needs parameter {name!r}")
    p = params["p"]
    eps = float(params.get("eps") or 0.0)
    s, e, x = params.get("S"), params.get("E"), params.get("X")
    # a set with no nonzero point has k = 0; the formulas read that as 1
    k, k1, k2 = (max(1, params.get(n) or 0) for n in ("k", "k1", "k2"))
    pe2 = p ** (eps / 2)

    if theorem_id == "prop-1.1":
        val = min(p ** 2, s * e / p ** 2)
    elif theorem_id == "thm-1.2":
        val = min(p ** 2, max(s * e / (p * k), math.sqrt(s) * e / (p ** ((1 - eps) / 2) * math.sqrt(k))))
    elif theorem_id == "thm-4.2b":
        val = min(p ** 2, s * e / (p * k))
    elif theorem_id == "thm-4.2a":
        val = float(p ** 2)
    elif theorem_id == "thm-1.5":
        val = min(p ** 3, x * e / p ** (3 - eps / 2))
    elif theorem_id in ("prop-1.3", "thm-1.4"):
        f = pe2 if theorem_id == "thm-1.4" else 1.0
        val = min(e * math.sqrt(s) * f / math.sqrt(k1 * k2),
                  math.sqrt(e * s) * f / k1 ** 0.25,
                  e * math.sqrt(s) * f / k1,
                  e * e / k1)
    else:  # rmk-4.4
        val = min(e ** 0.337 * math.sqrt(s) * pe2 / k1 ** (2 / 15),
                  e * math.sqrt(s) * pe2 / k1,
                  e * e / k1)
    if meta["log"]:
        val /= math.log2(p)
    return float(val)


# -- reports ------------------------------------------------------------------

@dataclass
class PackingReport:
    theorem_id: str
    p: int
    E_size: int
    S_size: int
    image_size: int
    predicted: float
    ratio: float
    params: dict[str, Any] = field(default_factory=dict)
    preconditions: list[dict[str, Any]] = field(default_factory=list)
    extra: dict[str, Any] = field(default_factory=dict)
    seed: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def csv_row(self) -> dict:
        return {"p": self.p, "E_size": self.E_size, "S_size": self.S_size,
                "k1": self.params.get("k1", ""), "k2": self.params.get("k2", ""),
                "eps": self.params.get("eps", ""), "theorem": self.theorem_id,
                "predicted": self.predicted, "actual": self.image_size,
                "ratio": self.ratio, "seed": "" if self.seed is None else self.seed}


def _stats_params(S: MatrixSet, E: PointSet, theorem_id: str, overrides: dict | None) -> dict:
    p = E.p
    params: dict[str, Any] = {"p": p, "E": len(E)}
    if S.kind == SL2:
        params["S"] = len(S)
        st = direction_stats(E)
        params.update(k1=st.k1, k2=st.k2, k=st.k1, eps=0.0)
    else:
        params["X"] = len(S)
        params["S"] = len(S)
        m, eps = fiber_stats(E) if len(E) else (0, 0.0)
        params.update(max_fiber=m, eps=eps)
    if overrides:
        params.update({k: v for k, v in overrides.items() if v is not None})
    return params


def compare(S: MatrixSet, E: PointSet, theorem_id: str, params: dict | None = None,
            seed: int | None = None) -> PackingReport:
    """|S(E)| against the predicted lower bound of ``theorem_id``.

    Direction statistics (k, k1, k2) and, for H1, the fibre exponent eps are
    read off E unless given in ``params``.
    """
    same_ctx(S, E)
    if len(E) == 0:
        raise EmptySet("compare needs a non-empty E")
    prm = _stats_params(S, E, theorem_id, params)
    p = prm["p"]
    pre: list[dict] = []
    extra: dict[str, Any] = {}
    img = image_set(S, E)
    actual = len(img)

    if theorem_id in ("prop-1.3", "thm-1.4", "rmk-4.4"):
        pre.append(check("|E| <= p", len(E) <= p, f"|E|={len(E)}"))
        pre.append(check("origin not in E", not E.contains_origin()))
    if theorem_id == "rmk-4.4":
        pre.append(check("|E| <= p^(8/15)", len(E) <= p ** (8 / 15), f"|E|={len(E)}"))
    if theorem_id == "thm-1.5":
        pre.append(check("E avoids F_p^2 x {0}", not np.any(E.pts[:, 2] == 0)))
        pre.append(check("fibres of E <= p^(1-eps)", prm["max_fiber"] <= p ** (1 - prm["eps"]) + 1e-9))
    if theorem_id == "thm-4.2a":
        pre.append(check("|E| >= 4p", len(E) >= 4 * p, f"|E|={len(E)}"))
        pre.append(check("|S| >= p^2", len(S) >= p * p, f"|S|={len(S)}"))
        best_size, best_x = -1, None
        for x in E:
            size = len(image_set(S, translate(E, x)))
            if size > best_size:
                best_size, best_x = size, x
        rich, rich_count = find_rich_point(E)
        extra.update(best_x=list(best_x), rich_point=list(rich), rich_lines=rich_count,
                     rich_image_size=len(image_set(S, translate(E, rich))))
        actual = best_size

    predicted = predicted_lower_bound(theorem_id, prm)
    ratio = actual / predicted if predicted > 0 else math.inf
    return PackingReport(theorem_id, p, len(E), len(S), actual, predicted, ratio,
                         {k: v for k, v in prm.items() if k not in ("S", "E", "X", "p")},
                         pre, extra, seed)
