"""Piecewise tent-function algebra.

A tent with apex (a, h) is the concave piecewise-affine map
    x <= a:  x - a + h          x > a:  -x + a + h
(slopes exactly +-1).  Restricted to a closed interval that misses the apex it
degenerates to an affine piece; translating the apex to the nearer endpoint
leaves the values unchanged, so every +-1-slope affine piece is stored as a
tent with an in-interval apex.

A PiecewiseTent is a finite list of such restricted tents on intervals with
pairwise-disjoint interiors (values must agree where closures touch); the
domain may be disconnected.

`sup_convolve` is the optimization primitive of the tree solver:

    out(z) = max { sum_j g_j(x_j) : sum_j x_j = z, x_j in dom(g_j) }.

On single-interval tent inputs the output is again a tent: apex = sum of
apexes, domain = sum of intervals.  On multi-interval inputs the output is the
upper envelope over all per-input interval combinations; when every apex
abscissa lies in its domain and both one-sided Minkowski sums (below / above
the apexes) are connected, the convexified single-combination answer is exact
and the enumeration is skipped.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

EPS_TENT = 1e-9


class EmptyDomain(ValueError):
    pass


class InfeasibleTarget(ValueError):
    pass


# -- interval unions ---------------------------------------------------------


def merge_intervals(ivs, eps=EPS_TENT):
    """Sorted union of closed intervals, gluing overlaps and touching ends."""
    ivs = sorted((float(a), float(b)) for a, b in ivs if b >= a - eps)
    out = []
    for a, b in ivs:
        if out and a <= out[-1][1] + eps:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return [(a, b) for a, b in out]


def minkowski_sum(ivs1, ivs2):
    """Minkowski sum of two closed-interval unions."""
    return merge_intervals(
        [(a1 + a2, b1 + b2) for a1, b1 in ivs1 for a2, b2 in ivs2]
    )


def intersect_unions(ivs1, ivs2, eps=EPS_TENT):
    out = []
    for a1, b1 in ivs1:
        for a2, b2 in ivs2:
            lo, hi = max(a1, a2), min(b1, b2)
            if hi >= lo - eps:
                out.append((lo, max(hi, lo)))
    return merge_intervals(out)


def union_is_connected(ivs) -> bool:
    return len(merge_intervals(ivs)) <= 1


def sum_connected_by_gaps(ivs, n: int) -> bool:
    """Sufficient condition for the n-fold Minkowski sum of an interval union
    with itself to be connected: n >= 1 + max gap / min piece length."""
    ivs = merge_intervals(ivs)
    if len(ivs) <= 1:
        return True
    worst = 0.0
    for (a1, b1), (a2, b2) in zip(ivs, ivs[1:]):
        gap = a2 - b1
        short = min(b1 - a1, b2 - a2)
        if short <= 0:
            return False
        worst = max(worst, gap / short)
    return n >= 1 + worst


# -- tent pieces -------------------------------------------------------------


@dataclass(frozen=True)
class TentPiece:
    lo: float
    hi: float
    apex: tuple  # (a, h) with lo <= a <= hi after translation
    summit: tuple | None = None  # apex before domain restriction, if different

    @staticmethod
    def make(lo, hi, apex, summit=None) -> "TentPiece":
        lo, hi = float(lo), float(hi)
        if hi < lo - EPS_TENT:
            raise EmptyDomain(f"empty interval [{lo}, {hi}]")
        hi = max(hi, lo)
        a, h = float(apex[0]), float(apex[1])
        src = summit if summit is not None else (a, h)
        # translate the apex into the interval without changing values
        if a > hi:
            a, h = hi, hi - a + h
        elif a < lo:
            a, h = lo, -lo + a + h
        return TentPiece(lo, hi, (a, h), tuple(src))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        a, h = self.apex
        return np.where(x <= a, x - a + h, -x + a + h)

    def value(self, x) -> float:
        return float(self(x))

    def contains(self, x, eps=EPS_TENT) -> bool:
        return self.lo - eps <= x <= self.hi + eps


@dataclass(frozen=True)
class PiecewiseTent:
    pieces: tuple

    @staticmethod
    def make(pieces) -> "PiecewiseTent":
        # pieces may touch at endpoints (closures of half-open originals);
        # where one-sided values disagree the function takes the larger one
        ps = sorted(pieces, key=lambda p: (p.lo, p.hi))
        for p, q in zip(ps, ps[1:]):
            if q.lo < p.hi - EPS_TENT:
                raise ValueError("overlapping piece interiors")
        if not ps:
            raise EmptyDomain("no pieces")
        return PiecewiseTent(tuple(ps))

    @staticmethod
    def single(lo, hi, apex) -> "PiecewiseTent":
        return PiecewiseTent.make([TentPiece.make(lo, hi, apex)])

    @staticmethod
    def linear(lo, hi, slope, value_at_lo) -> "PiecewiseTent":
        """Affine piece with slope +-1 expressed as an endpoint-apex tent."""
        if slope not in (+1, -1, +1.0, -1.0):
            raise ValueError("slopes are restricted to +-1")
        if slope > 0:
            return PiecewiseTent.single(lo, hi, (hi, value_at_lo + (hi - lo)))
        return PiecewiseTent.single(lo, hi, (lo, value_at_lo))

    def domain(self):
        return merge_intervals([(p.lo, p.hi) for p in self.pieces])

    def contains(self, x, eps=EPS_TENT) -> bool:
        return any(p.contains(x, eps) for p in self.pieces)

    def piece_at(self, x) -> TentPiece:
        """Piece evaluating x; at shared endpoints the higher branch wins."""
        holders = [p for p in self.pieces if p.contains(x)]
        if holders:
            return max(holders, key=lambda p: p.value(x))
        best = min(self.pieces, key=lambda p: max(p.lo - x, x - p.hi))
        if max(best.lo - x, x - best.hi) > EPS_TENT:
            raise InfeasibleTarget(f"{x} outside the domain")
        return best

    def __call__(self, x) -> float:
        return self.piece_at(x).value(x)

    def max_point(self) -> tuple:
        """(argmax, max) over the whole domain."""
        best = None
        for p in self.pieces:
            a, h = p.apex
            if best is None or h > best[1] + EPS_TENT:
                best = (a, h)
        return best

    def restrict(self, ivs) -> "PiecewiseTent":
        """Restriction to an interval union (pieces split at the boundary)."""
        out = []
        for p in self.pieces:
            for lo, hi in ivs:
                a, b = max(p.lo, lo), min(p.hi, hi)
                if b >= a - EPS_TENT:
                    out.append(TentPiece.make(a, max(a, b), p.apex, summit=p.summit))
        if not out:
            raise EmptyDomain("restriction is empty")
        return PiecewiseTent.make(out)

    def shift(self, dx, dy) -> "PiecewiseTent":
        return PiecewiseTent.make(
            [
                TentPiece.make(
                    p.lo + dx, p.hi + dx,
                    (p.apex[0] + dx, p.apex[1] + dy),
                    summit=(p.summit[0] + dx, p.summit[1] + dy),
                )
                for p in self.pieces
            ]
        )


def tent_of_load(p0: float) -> PiecewiseTent:
    """Residual-load term of a single node: value |u| of shedding p0 to u,
    over the monotone range between 0 and p0; apex (p0, |p0|)."""
    lo, hi = min(0.0, p0), max(0.0, p0)
    return PiecewiseTent.single(lo, hi, (p0, abs(p0)))


# -- upper envelopes ---------------------------------------------------------


def _envelope(cands) -> PiecewiseTent:
    """Pointwise max of tent pieces, returned as a PiecewiseTent.

    Breakpoints: piece endpoints, apexes, and pairwise crossings; on each
    elementary interval the winner is a single affine branch, re-emitted as an
    endpoint-apex tent and merged with its neighbours when it continues the
    same tent.
    """
    bps = set()
    for p in cands:
        bps.update((p.lo, p.hi, p.apex[0]))
    for i, p in enumerate(cands):
        for q in cands[i + 1:]:
            lo, hi = max(p.lo, q.lo), min(p.hi, q.hi)
            if hi < lo - EPS_TENT:
                continue
            # crossings of the up/down branches of p and q
            pa, ph = p.apex
            qa, qh = q.apex
            for sp in (+1, -1):
                for sq in (+1, -1):
                    if sp == sq:
                        continue
                    # sp*x + cp = sq*x + cq
                    cp = ph - sp * pa
                    cq = qh - sq * qa
                    x = (cq - cp) / (sp - sq)
                    if lo - EPS_TENT <= x <= hi + EPS_TENT:
                        bps.add(x)
    bps = sorted(bps)
    segs = []
    for x0, x1 in zip(bps, bps[1:]):
        if x1 - x0 <= EPS_TENT:
            continue
        xm = 0.5 * (x0 + x1)
        best, bv = None, -np.inf
        for p in cands:
            if p.contains(xm):
                v = p.value(xm)
                if v > bv + EPS_TENT:
                    best, bv = p, v
        if best is None:
            continue
        segs.append(TentPiece.make(x0, x1, best.apex, summit=best.summit))
    if not segs:
        # single-point domains
        pts = {}
        for p in cands:
            if p.hi - p.lo <= EPS_TENT:
                v = p.value(p.lo)
                if pts.get(p.lo, (-np.inf,))[0] < v:
                    pts[p.lo] = (v, p)
        segs = [TentPiece.make(x, x, pc.apex, summit=pc.summit) for x, (v, pc) in pts.items()]
        if not segs:
            raise EmptyDomain("empty envelope")
        return PiecewiseTent.make(segs)
    # merge adjacent segments that continue one tent
    merged = [segs[0]]
    for s in segs[1:]:
        prev = merged[-1]
        if (
            abs(s.lo - prev.hi) <= EPS_TENT
            and np.allclose(s.apex, prev.apex, atol=1e-9)
        ):
            merged[-1] = TentPiece.make(prev.lo, s.hi, prev.apex, summit=prev.summit)
        else:
            merged.append(s)
    return PiecewiseTent.make(merged)


# -- the sup-convolution operator --------------------------------------------


def _single_combo(pieces) -> TentPiece:
    """Exact output tent for one interval per input: apex and domain add."""
    lo = sum(p.lo for p in pieces)
    hi = sum(p.hi for p in pieces)
    a = sum(p.apex[0] for p in pieces)
    h = sum(p.apex[1] for p in pieces)
    return TentPiece.make(lo, hi, (a, h), summit=(a, h))


def _whole_tent_of(g: PiecewiseTent):
    """Apex of a single tent agreeing with g on its whole domain, or None."""
    a, h = g.max_point()
    for p in g.pieces:
        ref = TentPiece.make(p.lo, p.hi, (a, h))
        for x in (p.lo, 0.5 * (p.lo + p.hi), p.hi, p.apex[0]):
            if abs(ref.value(x) - p.value(x)) > 1e-7:
                return None
    return (a, h)


def shortcut_applies(inputs) -> bool:
    """Convexified answer is exact iff every input is a restricted single tent
    whose apex abscissa lies in the true domain, and both one-sided Minkowski
    sums of the domains (below / above the apexes) are connected."""
    below, above = [(0.0, 0.0)], [(0.0, 0.0)]
    for g in inputs:
        tent = _whole_tent_of(g)
        if tent is None:
            return False
        a = tent[0]
        if not g.contains(a):
            return False
        dom = g.domain()
        lower = intersect_unions(dom, [(dom[0][0] - 1.0, a)])
        upper = intersect_unions(dom, [(a, dom[-1][1] + 1.0)])
        below = minkowski_sum(below, lower)
        above = minkowski_sum(above, upper)
    return union_is_connected(below) and union_is_connected(above)


def sup_convolve(inputs, force_enumeration=False) -> PiecewiseTent:
    """max of summed inputs subject to the arguments summing to z, as a
    function of z; inputs are PiecewiseTent, the output is one too."""
    inputs = list(inputs)
    if not inputs:
        raise EmptyDomain("no inputs")
    if len(inputs) == 1:
        return inputs[0]
    if not force_enumeration and shortcut_applies(inputs):
        hull_pieces = []
        for g in inputs:
            dom = g.domain()
            lo, hi = dom[0][0], dom[-1][1]
            hull_pieces.append(TentPiece.make(lo, hi, g.max_point()))
        out = _single_combo(hull_pieces)
        return PiecewiseTent.make([out])
    cands = [
        _single_combo(combo)
        for combo in product(*[g.pieces for g in inputs])
    ]
    return _envelope(cands)


def split_target(inputs, z: float, eps=1e-7):
    """One maximizer x* with sum(x*) = z for the sup-convolution at z.

    Picks the best interval combination, then water-fills from the apex
    vector: proportional movement toward the zero-clamped floor first (the
    maximizer stays inside the monotone box of the apexes when possible),
    continuing proportionally to the interval ends.
    """
    inputs = list(inputs)
    best = None
    for combo in product(*[g.pieces for g in inputs]):
        lo = sum(p.lo for p in combo)
        hi = sum(p.hi for p in combo)
        if not (lo - eps <= z <= hi + eps):
            continue
        t = _single_combo(combo)
        v = t.value(min(max(z, lo), hi))
        if best is None or v > best[0] + EPS_TENT:
            best = (v, combo)
    if best is None:
        raise InfeasibleTarget(f"{z} outside the summed domain")
    combo = best[1]
    a = np.array([p.apex[0] for p in combo])
    lo = np.array([p.lo for p in combo])
    hi = np.array([p.hi for p in combo])
    z = min(max(z, lo.sum()), hi.sum())
    if z <= a.sum():
        ends = lo
        mid = np.maximum(lo, np.minimum(a, np.where(a >= 0, 0.0, a)))
    else:
        ends = hi
        mid = np.minimum(hi, np.maximum(a, np.where(a <= 0, 0.0, a)))
    x = _two_phase_fill(a, mid, ends, z)
    return x


def _two_phase_fill(start, mid, ends, z):
    """Interpolate start -> mid -> ends proportionally until the sum hits z."""
    s0, s1, s2 = start.sum(), mid.sum(), ends.sum()
    if abs(z - s0) <= EPS_TENT:
        return start.copy()
    if (z - s1) * (z - s0) <= 0:  # z between start and mid sums
        t = (z - s0) / (s1 - s0)
        return start + t * (mid - start)
    if abs(s2 - s1) <= EPS_TENT:
        return mid.copy()
    t = (z - s1) / (s2 - s1)
    return mid + t * (ends - mid)
