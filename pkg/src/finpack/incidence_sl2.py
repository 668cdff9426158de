"""Exact incidence and energy counts for SL_2(F_p), and the bound evaluators built on them.

A pair (x, y) in F_p^2 x F_p^2 is incident to theta when theta y = x.  Each
fast counter here has a slow, literal oracle next to it (``*_naive`` or
``*_bruteforce``); tests hold the two against each other.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Any, Hashable, Iterable, Mapping

import numpy as np

from .errors import EmptySet, MissingParam, ParseError
from .fp_core import (
    Line,
    PointSet,
    as_ctx,
    direction_stats,
    field_new,
    read_header,
    same_ctx,
    skew_histogram,
    skew_table,
)
from .groups import (
    SL2,
    MatrixSet,
    max_coset_intersection,
    sl2_apply_codes,
    sl2_keys,
    sl2_product_entries,
)

_CHUNK_CELLS = 1 << 22


# -- weighted sets ------------------------------------------------------------

class WeightedSet:
    """Elements with positive integer multiplicities; Σm and Σm² are cached."""

    __slots__ = ("mult", "total", "sq")

    def __init__(self, items: Mapping[Hashable, int] | Iterable[Hashable]):
        if isinstance(items, Mapping):
            mult = {k: int(v) for k, v in items.items()}
        else:
            mult = dict(Counter(items))
        if any(m < 1 for m in mult.values()):
            raise ValueError("multiplicities must be positive integers")
        self.mult = mult
        self.total = sum(mult.values())
        self.sq = sum(m * m for m in mult.values())

    def __len__(self) -> int:
        return len(self.mult)

    def __iter__(self):
        return iter(self.mult)

    def items(self):
        return self.mult.items()

    def __getitem__(self, key) -> int:
        return self.mult.get(key, 0)

    def __repr__(self) -> str:
        return f"WeightedSet(support={len(self)}, total={self.total}, sq={self.sq})"


# -- incidences ---------------------------------------------------------------

def count_incidences(A: PointSet, B: PointSet, S: MatrixSet) -> int:
    """|{(x, y, theta) in A x B x S : theta y = x}| via a presence bitmap of A."""
    ctx = same_ctx(A, B, S)
    p = ctx.p
    if not (len(A) and len(B) and len(S)):
        return 0
    inA = A.bitmap()
    step = max(1, _CHUNK_CELLS // len(B))
    total = 0
    for s in range(0, len(S), step):
        codes = sl2_apply_codes(S.entries[s:s + step], B.pts, p)
        total += int(np.count_nonzero(inA[codes]))
    return total


def count_incidences_naive(A: PointSet, B: PointSet, S: MatrixSet) -> int:
    """Triple loop over A x B x S; the oracle for ``count_incidences``."""
    same_ctx(A, B, S)
    a_pts = list(A)
    total = 0
    for theta in S:
        for y in B:
            image = theta(y)
            for x in a_pts:
                if x == image:
                    total += 1
    return total


def incidences_per_element(A: PointSet, B: PointSet, S: MatrixSet) -> np.ndarray:
    """|theta B ∩ A| for every theta in S (in storage order)."""
    same_ctx(A, B, S)
    out = np.zeros(len(S), dtype=np.int64)
    if not (len(A) and len(B)):
        return out
    inA = A.bitmap()
    step = max(1, _CHUNK_CELLS // len(B))
    for s in range(0, len(S), step):
        codes = sl2_apply_codes(S.entries[s:s + step], B.pts, A.p)
        out[s:s + step] = np.count_nonzero(inA[codes], axis=1)
    return out


# -- energies -----------------------------------------------------------------

def energy1(A: PointSet, B: PointSet) -> int:
    """#{(x1, x2, y1, y2) in A^2 x B^2 : skew(x1, x2) = skew(y1, y2)} via value histograms."""
    ctx = same_ctx(A, B)
    rA = skew_histogram(A.pts, ctx.p)
    rB = skew_histogram(B.pts, ctx.p)
    return int(np.dot(rA, rB))


def energy1_bruteforce(A: PointSet, B: PointSet) -> int:
    """Compare every A-pair against every B-pair; O(|A|^2 |B|^2)."""
    ctx = same_ctx(A, B)
    sa = skew_table(A.pts, A.pts, ctx.p).ravel()
    sb = skew_table(B.pts, B.pts, ctx.p).ravel()
    return int(np.count_nonzero(sa[:, None] == sb[None, :]))


def quad_skew_exact(B: PointSet) -> int:
    """#{(x, y, u, v) in B^4 : skew(x, y) = skew(u, v)}."""
    return energy1(B, B)


def _product_key_counts(S: MatrixSet) -> np.ndarray:
    p = S.p
    n = len(S)
    if p ** 4 <= 1 << 22:
        hist = np.zeros(p ** 4, dtype=np.int64)
        step = max(1, _CHUNK_CELLS // max(n, 1))
        for s in range(0, n, step):
            keys = sl2_keys(sl2_product_entries(S.entries[s:s + step], S.entries, p), p)
            hist += np.bincount(keys, minlength=p ** 4)
        return hist[hist > 0]
    keys = sl2_keys(sl2_product_entries(S.entries, S.entries, p), p)
    return np.unique(keys, return_counts=True)[1]


def energy2(S: MatrixSet) -> int:
    """E(S, S) = #{(a, b, c, d) in S^4 : ab = cd} = sum over g of r(g)^2."""
    if S.kind != SL2:
        raise ValueError("energy2 is defined for SL2 sets")
    r = _product_key_counts(S)
    return int(np.dot(r, r))


def energy2_bruteforce(S: MatrixSet) -> int:
    """Compare every product ab with every product cd; O(|S|^4)."""
    keys = sl2_keys(sl2_product_entries(S.entries, S.entries, S.p), S.p)
    return int(np.count_nonzero(keys[:, None] == keys[None, :]))


def empirical_epsilon(S: MatrixSet) -> float:
    """log_p(|S|^3 / E(S, S)), clamped below at 0."""
    if len(S) == 0:
        raise EmptySet("empirical epsilon of an empty set")
    e = energy2(S)
    return max(0.0, math.log(len(S) ** 3 / e) / math.log(S.p))


# -- weighted point-line incidences -------------------------------------------

def _as_line(ctx, ell) -> Line:
    if isinstance(ell, Line):
        return ell
    return Line.make(ctx, *ell)


def weighted_pl_incidences(P: WeightedSet, L: WeightedSet, ctx) -> int:
    """sum over incident (point, line) of m(point) * m(line).

    Points are (x, y) tuples; lines are ``Line`` objects or (a, b, c) triples
    for a*x + b*y = c.
    """
    c = as_ctx(ctx)
    p = c.p
    if not len(P) or not len(L):
        return 0
    weight = np.zeros(p * p, dtype=np.int64)
    for (x, y), m in P.items():
        weight[(x % p) * p + (y % p)] += m
    lines = [_as_line(c, ell) for ell in L]
    mults = np.array([L[ell] for ell in L], dtype=np.int64)
    pts = np.stack([ell.points() for ell in lines])  # (nL, p, 2)
    on_line = weight[pts[..., 0] * p + pts[..., 1]].sum(axis=1)
    return int(np.dot(mults, on_line))


def weighted_pl_incidences_naive(P: WeightedSet, L: WeightedSet, ctx) -> int:
    c = as_ctx(ctx)
    total = 0
    for ell, ml in L.items():
        line = _as_line(c, ell)
        for pt, mp in P.items():
            if line.contains(pt):
                total += ml * mp
    return total


def loads_weighted(text: str) -> tuple[str, Any, WeightedSet]:
    """Parse 'p=<p> kind=<points|lines>' followed by rows 'x,y[,m]' or 'a,b,c[,m]'."""
    header, body = read_header(text)
    try:
        p, kind = int(header["p"]), header["kind"]
    except (KeyError, ValueError):
        raise ParseError("header must read 'p=<prime> kind=<points|lines>'") from None
    if kind not in ("points", "lines"):
        raise ParseError(f"unknown kind {kind!r}")
    ctx = field_new(p)
    width = 2 if kind == "points" else 3
    mult: Counter = Counter()
    for lineno, ln in body:
        try:
            vals = [int(v) for v in ln.split(",")]
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        if len(vals) not in (width, width + 1):
            raise ParseError(f"line {lineno}: expected {width} or {width + 1} entries")
        m = vals[width] if len(vals) > width else 1
        if m < 1:
            raise ParseError(f"line {lineno}: multiplicity must be positive")
        key = tuple(v % p for v in vals[:width])
        if kind == "lines":
            try:
                key = Line.make(ctx, *key)
            except ValueError as exc:
                raise ParseError(f"line {lineno}: {exc}") from None
        mult[key] += m
    return kind, ctx, WeightedSet(dict(mult))


# -- bound reports ------------------------------------------------------------

@dataclass
class BoundReport:
    """Exact count next to a bound formula evaluated with implied constant 1.

    ``kind`` fixes how ``empirical_constant`` is read:
      two_sided   |exact - main| / sum(error terms)
      upper_main  (exact - main) / sum(error terms), for "main + C * error" bounds
      upper       exact / predicted
      lower       exact / predicted
    """
    theorem_id: str
    kind: str
    p: int
    exact: int
    main_term: float
    error_terms: list[tuple[str, float]]
    predicted: float
    empirical_constant: float
    log_factor: float = 1.0
    sizes: dict[str, int] = field(default_factory=dict)
    params: dict[str, Any] = field(default_factory=dict)
    preconditions: list[dict[str, Any]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def preconditions_hold(self) -> bool:
        return all(c["status"] != "violated" for c in self.preconditions if c.get("required", True))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["exact"] = int(self.exact)
        d["terms"] = [{"label": k, "value": v} for k, v in self.error_terms]
        del d["error_terms"]
        d["preconditions_hold"] = self.preconditions_hold
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), default=_json_default, **kw)


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def finalize(theorem_id, kind, p, exact, main, terms, *, log=False, sizes=None,
             params=None, pre=None, notes=None) -> BoundReport:
    """Assemble a report; ``log`` applies the log2(p) factor of the ≲ notation."""
    lf = math.log2(p) if log else 1.0
    err = sum(v for _, v in terms)
    if kind == "two_sided":
        predicted = main + err
        const = abs(exact - main) / err if err > 0 else math.inf
    elif kind == "upper_main":
        predicted = main + err
        const = (exact - main) / err if err > 0 else math.inf
    elif kind == "upper":
        predicted = lf * err
        const = exact / predicted if predicted > 0 else (0.0 if exact == 0 else math.inf)
    elif kind == "lower":
        predicted = main / lf
        const = exact / predicted if predicted > 0 else math.inf
    else:
        raise ValueError(f"unknown report kind {kind!r}")
    return BoundReport(theorem_id, kind, p, int(exact), float(main),
                       [(k, float(v)) for k, v in terms], float(predicted), float(const),
                       lf, sizes or {}, params or {}, pre or [], notes or [])


def check(name: str, ok: bool | None, detail: str = "", required: bool = True) -> dict:
    status = "unchecked" if ok is None else ("satisfied" if ok else "violated")
    return {"name": name, "status": status, "detail": detail, "required": required}


def structure_checks(S: MatrixSet, gamma: float | None, eps: float) -> list[dict]:
    """Hypotheses on S used by the eps-improved bounds.

    With eps = 0 the bounds fall back to the trivial energy estimate and the
    hypotheses are reported but not required.
    """
    required = eps > 0
    out = [check("S symmetric", S.symmetric, required=required)]
    if gamma is None:
        out.append(check("p^gamma < |S| < p^(3-2gamma)", None, "gamma not supplied", required))
        out.append(check("|S ∩ gH| < p^(-gamma/2)|S|", None, "gamma not supplied", required))
        return out
    p, n = S.p, len(S)
    out.append(check("p^gamma < |S| < p^(3-2gamma)", p ** gamma < n < p ** (3 - 2 * gamma),
                     f"|S|={n}, window=({p ** gamma:.4g}, {p ** (3 - 2 * gamma):.4g})", required))
    rep = max_coset_intersection(S, gamma)
    if not rep.bg_condition_holds:
        st = check("|S ∩ gH| < p^(-gamma/2)|S|", False, "", required)
    elif rep.holds_with_slack:
        st = check("|S ∩ gH| < p^(-gamma/2)|S|", True, "", required)
    else:
        st = check("|S ∩ gH| < p^(-gamma/2)|S|", None, "", required)
        st["status"] = "inconclusive"
    st["detail"] = (f"max ratio {rep.max_ratio:.4g} ({rep.family}) vs threshold {rep.threshold:.4g}; "
                    f"exceptional-subgroup slack {rep.exceptional_slack:.4g}")
    out.append(st)
    return out


THEOREMS: dict[str, dict[str, Any]] = {
    "thm-2.1": {"kind": "two_sided", "log": False, "needs": "ABS"},
    "thm-2.1k": {"kind": "two_sided", "log": False, "needs": "ABS"},
    "thm-2.2": {"kind": "upper", "log": False, "needs": "ABS"},
    "thm-2.2k": {"kind": "upper", "log": False, "needs": "ABS"},
    "thm-2.3.1": {"kind": "upper", "log": True, "needs": "ABS"},
    "thm-2.3.2": {"kind": "upper", "log": True, "needs": "ABS"},
    "thm-3.7.1": {"kind": "upper", "log": True, "needs": "ABS"},
    "thm-3.7.2": {"kind": "upper", "log": True, "needs": "ABS"},
    "thm-3.8": {"kind": "upper", "log": True, "needs": "ABS"},
    "thm-3.9": {"kind": "upper", "log": True, "needs": "ABS"},
    "lem-2.3": {"kind": "upper_main", "log": False, "needs": "AB"},
    "lem-2.3k": {"kind": "upper_main", "log": False, "needs": "AB"},
    "lem-2.7": {"kind": "upper", "log": False, "needs": "B"},
    "lem-2.8": {"kind": "upper", "log": False, "needs": "B"},
    "lem-quad": {"kind": "upper", "log": False, "needs": "AB"},
    "bnp": {"kind": "upper", "log": False, "needs": "S"},
    "cor-3.6": {"kind": "upper", "log": False, "needs": "S"},
    "sdz": {"kind": "upper", "log": False, "needs": "PL"},
    "sdz-multi": {"kind": "upper", "log": True, "needs": "PL"},
}

_ALIASES = {"thm-2.3(1)": "thm-2.3.1", "thm-2.3(2)": "thm-2.3.2",
            "thm-3.7(1)": "thm-3.7.1", "thm-3.7(2)": "thm-3.7.2"}


def normalize_theorem_id(theorem_id: str) -> str:
    return _ALIASES.get(theorem_id, theorem_id)


def _require(inputs: dict, names: str, theorem_id: str):
    for ch in names:
        if inputs.get(ch) is None:
            raise MissingParam(f"{theorem_id} needs input {ch!r}")


def _k_of(E: PointSet) -> tuple[int, int]:
    st = direction_stats(E)
    return st.k1, st.k2


def evaluate_bound(theorem_id: str, **inputs) -> BoundReport:
    """Exact count and bound terms for one SL_2-side statement.

    Inputs by name: A, B (PointSet), S (MatrixSet), P, L (WeightedSet) with
    ctx, and the numeric parameters k, k1, k2, gamma, eps.  Direction
    parameters default to the exact statistics of the relevant set; eps
    defaults to 0 (for cor-3.6, to the empirical epsilon of S).
    """
    tid = normalize_theorem_id(theorem_id)
    if tid not in THEOREMS:
        raise KeyError(f"unknown theorem id {theorem_id!r}")
    meta = THEOREMS[tid]
    _require(inputs, meta["needs"], tid)
    eps = inputs.get("eps")
    gamma = inputs.get("gamma")
    A, B, S = inputs.get("A"), inputs.get("B"), inputs.get("S")

    if tid in ("sdz", "sdz-multi"):
        return _eval_sdz(tid, inputs)
    if tid in ("bnp", "cor-3.6"):
        return _eval_energy2(tid, S, eps, gamma)
    if tid in ("lem-2.3", "lem-2.3k", "lem-2.7", "lem-2.8", "lem-quad"):
        return _eval_energy1(tid, A, B, inputs)

    eps = 0.0 if eps is None else float(eps)
    ctx = same_ctx(A, B, S)
    p = ctx.p
    a, b, s = len(A), len(B), len(S)
    sizes = {"A": a, "B": b, "S": s, "P": a * b}
    exact = count_incidences(A, B, S)
    kA, _ = _k_of(A)
    kB, k2B = _k_of(B)
    params: dict[str, Any] = {"eps": eps, "gamma": gamma}
    pre: list[dict] = []
    notes: list[str] = []
    origin_pair = A.contains_origin() and B.contains_origin()

    def origin_check(terms):
        pre.append(check("(0,0,0,0) not in P", not origin_pair,
                         "origin pair contributes |S| incidences; added as a slack term" if origin_pair else ""))
        if origin_pair:
            terms.append(("origin slack |S|", float(s)))
        return terms

    if tid in ("thm-2.1", "thm-2.1k"):
        main = a * b * s / p ** 2
        if tid == "thm-2.1":
            terms = [("p*sqrt(|S||P|)", p * math.sqrt(s * a * b)), ("|S|", float(s))]
        else:
            k = inputs.get("k") if inputs.get("k") is not None else min(kA, kB)
            params["k"] = k
            terms = [("p^(1/2)k^(1/2)sqrt(|S||P|)", math.sqrt(p * k * s * a * b)), ("|S|", float(s))]
        return finalize(tid, "two_sided", p, exact, main, terms, sizes=sizes, params=params, pre=pre)

    k = inputs.get("k") if inputs.get("k") is not None else kB
    k1 = inputs.get("k1") if inputs.get("k1") is not None else kB
    k2 = inputs.get("k2") if inputs.get("k2") is not None else k2B
    pe4 = p ** (eps / 4)

    if tid == "thm-2.2":
        terms = [("|A|^(1/2)|B||S|/p", math.sqrt(a) * b * s / p),
                 ("p^((2-eps)/4)|A|^(1/2)|B|^(1/2)|S|^(3/4)", p ** ((2 - eps) / 4) * math.sqrt(a * b) * s ** 0.75)]
    elif tid == "thm-2.2k":
        params["k"] = k
        terms = [("|A|^(1/2)|B||S|/p", math.sqrt(a) * b * s / p),
                 ("k^(1/4)p^((1-eps)/4)|A|^(1/2)|B|^(1/2)|S|^(3/4)",
                  k ** 0.25 * p ** ((1 - eps) / 4) * math.sqrt(a * b) * s ** 0.75)]
    elif tid == "thm-2.3.1":
        params.update(k1=k1, k2=k2)
        pre.append(check("|B| <= p", b <= p, f"|B|={b}"))
        terms = [("k1^(1/2)|A|^(1/2)|S|", math.sqrt(k1 * a) * s),
                 ("k1^(1/2)|B|^(1/2)|A|^(1/2)|S|^(3/4)/p^(eps/4)", math.sqrt(k1 * b * a) * s ** 0.75 / pe4),
                 ("k1^(1/8)|B|^(3/4)|A|^(1/2)|S|^(3/4)/p^(eps/4)", k1 ** 0.125 * b ** 0.75 * math.sqrt(a) * s ** 0.75 / pe4),
                 ("k1^(1/4)k2^(1/4)|B|^(1/2)|A|^(1/2)|S|^(3/4)/p^(eps/4)",
                  (k1 * k2) ** 0.25 * math.sqrt(b * a) * s ** 0.75 / pe4)]
    elif tid == "thm-2.3.2":
        params.update(k1=k1)
        pre.append(check("|B| <= p^(8/15)", b <= p ** (8 / 15), f"|B|={b}, p^(8/15)={p ** (8 / 15):.4g}"))
        terms = [("k1^(1/2)|A|^(1/2)|S|", math.sqrt(k1 * a) * s),
                 ("k1^(1/2)|B|^(1/2)|A|^(1/2)|S|^(3/4)/p^(eps/4)", math.sqrt(k1 * b * a) * s ** 0.75 / pe4),
                 ("k1^(1/15)|B|^(187/225)|A|^(1/2)|S|^(3/4)/p^(eps/4)",
                  k1 ** (1 / 15) * b ** (187 / 225) * math.sqrt(a) * s ** 0.75 / pe4)]
    elif tid == "thm-3.7.1":
        params["k"] = k
        pre.append(check("|B| < k^(1/2) p", b < math.sqrt(k) * p, f"|B|={b}"))
        terms = [("k^(1/2)|A|^(1/2)|S|", math.sqrt(k * a) * s),
                 ("k^(1/4)p^((1-eps)/4)|A|^(1/2)|B|^(1/2)|S|^(3/4)",
                  k ** 0.25 * p ** ((1 - eps) / 4) * math.sqrt(a * b) * s ** 0.75)]
    elif tid == "thm-3.7.2":
        params["k"] = k
        pre.append(check("|B| >= k^(1/2) p", b >= math.sqrt(k) * p, f"|B|={b}"))
        terms = [("|A|^(1/2)|B||S|^(3/4)/p^((1+eps)/4)", math.sqrt(a) * b * s ** 0.75 / p ** ((1 + eps) / 4))]
    elif tid == "thm-3.8":
        params["k"] = k
        terms = [("|A||B||S|^(1/2)/p^(1/2)", a * b * math.sqrt(s / p)),
                 ("k^(1/2)p^(1/2)|A|^(1/2)|B|^(1/2)|S|^(1/2)", math.sqrt(k * p * a * b * s)),
                 ("k|S|", float(k * s))]
    else:  # thm-3.9
        params["k"] = k
        pre.append(check("|B| <= |A| <= p^(8/15)", b <= a <= p ** (8 / 15),
                         f"|A|={a}, |B|={b}, p^(8/15)={p ** (8 / 15):.4g}"))
        terms = [("k^(2/15)|A|^(11/15)|B|^(209/225)|S|^(1/2)",
                  k ** (2 / 15) * a ** (11 / 15) * b ** (209 / 225) * math.sqrt(s)),
                 ("k|A|^(1/2)|B|^(1/2)|S|^(1/2)", k * math.sqrt(a * b * s)),
                 ("k|S|", float(k * s))]

    if tid in ("thm-2.2", "thm-2.2k", "thm-2.3.1", "thm-2.3.2", "thm-3.7.1", "thm-3.7.2"):
        pre.extend(structure_checks(S, gamma, eps))
    terms = origin_check(terms)
    return finalize(tid, "upper", p, exact, 0.0, terms, log=meta["log"], sizes=sizes,
                    params=params, pre=pre, notes=notes)


def _eval_energy1(tid: str, A, B, inputs) -> BoundReport:
    if tid in ("lem-2.7", "lem-2.8"):
        A = B
    ctx = same_ctx(A, B)
    p = ctx.p
    a, b = len(A), len(B)
    exact = energy1(A, B)
    kA, _ = _k_of(A)
    kB, k2B = _k_of(B)
    params: dict[str, Any] = {}
    pre: list[dict] = []
    sizes = {"A": a, "B": b}
    if tid in ("lem-2.3", "lem-2.3k"):
        main = a * a * b * b / p
        if tid == "lem-2.3":
            terms = [("p^2|A||B|", float(p * p * a * b))]
        else:
            k = inputs.get("k") if inputs.get("k") is not None else min(kA, kB)
            params["k"] = k
            terms = [("p k|A||B|", float(p * k * a * b))]
        return finalize(tid, "upper_main", p, exact, main, terms, sizes=sizes, params=params,
                        notes=["empirical_constant estimates the unspecified C"])
    if tid == "lem-2.7":
        k1 = inputs.get("k1") if inputs.get("k1") is not None else kB
        k2 = inputs.get("k2") if inputs.get("k2") is not None else k2B
        params.update(k1=k1, k2=k2)
        pre.append(check("|B| <= p", b <= p, f"|B|={b}"))
        terms = [("k1^(1/2)|B|^3", math.sqrt(k1) * b ** 3), ("k1 k2|B|^2", float(k1 * k2 * b * b)),
                 ("k1^2|B|^2", float(k1 * k1 * b * b))]
    elif tid == "lem-2.8":
        k = inputs.get("k") if inputs.get("k") is not None else kB
        params["k"] = k
        pre.append(check("|B| <= p^(8/15)", b <= p ** (8 / 15), f"|B|={b}"))
        terms = [("k^(4/15)|B|^(748/225)", k ** (4 / 15) * b ** (748 / 225)), ("k^2|B|^2", float(k * k * b * b))]
    else:  # lem-quad
        k = inputs.get("k") if inputs.get("k") is not None else max(kA, kB)
        params["k"] = k
        pre.append(check("|B| <= |A| <= p^(8/15)", b <= a <= p ** (8 / 15), f"|A|={a}, |B|={b}"))
        terms = [("k^(4/15)|A|^(22/15)|B|^(418/225)", k ** (4 / 15) * a ** (22 / 15) * b ** (418 / 225)),
                 ("k^2|A||B|", float(k * k * a * b))]
    return finalize(tid, "upper", p, exact, 0.0, terms, sizes=sizes, params=params, pre=pre)


def _eval_energy2(tid: str, S: MatrixSet, eps, gamma) -> BoundReport:
    p, s = S.p, len(S)
    exact = energy2(S)
    sizes = {"S": s}
    if tid == "bnp":
        terms = [("p^2|S|^2", float(p * p * s * s)), ("|S|^4/p^3", s ** 4 / p ** 3)]
        return finalize(tid, "upper", p, exact, 0.0, terms, sizes=sizes)
    notes = []
    if eps is None:
        eps = empirical_epsilon(S)
        notes.append("eps taken as the empirical epsilon of S")
    eps = float(eps)
    terms = [("|S|^3/p^eps", s ** 3 / p ** eps)]
    pre = structure_checks(S, gamma, eps)
    return finalize(tid, "upper", p, exact, 0.0, terms, sizes=sizes,
                    params={"eps": eps, "gamma": gamma}, pre=pre, notes=notes)


def _eval_sdz(tid: str, inputs) -> BoundReport:
    P, L = inputs["P"], inputs["L"]
    ctx = as_ctx(inputs.get("ctx") or inputs.get("p"))
    p = ctx.p
    if tid == "sdz":
        Pw = WeightedSet(list(P))
        Lw = WeightedSet([_as_line(ctx, ell) for ell in L])
        exact = weighted_pl_incidences(Pw, Lw, ctx)
        np_, nl = len(Pw), len(Lw)
        pre = [check("|P| <= p^(8/5)", np_ <= p ** 1.6, f"|P|={np_}")]
        terms = [("|P|^(11/15)|L|^(11/15)", (np_ * nl) ** (11 / 15)), ("|P|", float(np_)), ("|L|", float(nl))]
        return finalize(tid, "upper", p, exact, 0.0, terms, sizes={"P": np_, "L": nl}, pre=pre)
    exact = weighted_pl_incidences(P, L, ctx)
    np_, nl = P.total, L.total
    pre = [check("|P| = sum m(p) <= p^(8/5)", np_ <= p ** 1.6, f"|P|={np_}")]
    terms = [("|P|^(7/15)|L|^(7/15)(Σm(p)^2)^(4/15)(Σm(l)^2)^(4/15)",
              (np_ * nl) ** (7 / 15) * (P.sq * L.sq) ** (4 / 15)),
             ("|P|", float(np_)), ("|L|", float(nl))]
    return finalize(tid, "upper", p, exact, 0.0, terms, log=True,
                    sizes={"P": np_, "L": nl, "P_support": len(P), "L_support": len(L)},
                    params={"sum_mP2": P.sq, "sum_mL2": L.sq}, pre=pre)
