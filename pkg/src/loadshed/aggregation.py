"""Exact finite aggregation of the reachable set and search over it.

Controls at a state live in the admissible polytope (shedding box of the
current injection set intersected with per-component balance).  Splitting that
polytope by the capacity hyperplanes f_i(E, u) = +-c_i groups controls by the
surviving link set: every full-dimensional cell of the arrangement maps to one
next topology.  A node of the search is (active set, control polytope); the
one-stage value is the redispatch maximum s.u over the feasible cell, deeper
values are the max over cells of the child values.  Pruning uses
   one-stage value <= t-stage value <= max over the polytope of s.p
and a node closes immediately when the two bounds meet.

Everything operates on the coordinates of the non-transmission nodes with a
nonzero initial injection ("ambient" coordinates); all other coordinates of a
control are identically zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .cascade import EPS_CAP, NetworkState, failure_step, is_feasible
from .network import (
    Network,
    connected_components,
    flow_matrix,
    pseudo_inverse,
    update_pseudo_inverse,
)


class RetrievalFailed(RuntimeError):
    """Could not realize the aggregated optimum by concrete controls."""


@dataclass
class AggNode:
    """Aggregated search state: active links plus the (closed) polytope of
    injection vectors that reached them, in ambient coordinates."""

    active: frozenset
    region: geo.IncidenceGraph  # lattice of cl(P)
    beta: tuple = ()  # flow-sign vector that produced the region
    depth: int = 0
    lower_bound: float = -np.inf
    upper_bound: float = np.inf


@dataclass
class AggControl:
    """One cell of the consistent partition: all controls in `region` remove
    exactly the links flagged by `beta`."""

    region: geo.IncidenceGraph
    beta: tuple
    next_active: frozenset


@dataclass
class SearchResult:
    value: float
    controls: list  # AggControl per stage
    terminal_region: geo.IncidenceGraph | None
    terminal_u: np.ndarray | None  # ambient coordinates
    per_depth: dict = field(default_factory=dict)  # horizon -> value
    requested: int = 0  # stage count asked of value_iteration


class _Ambient:
    """Coordinate frame of the search: the non-transmission nodes carrying a
    nonzero initial injection, in node order."""

    def __init__(self, net: Network, p0):
        p0 = np.asarray(p0, dtype=float)
        self.net = net
        self.node_ids = [
            n
            for n in net.nodes
            if net.roles[n] != "transmission" and abs(p0[net.node_index[n]]) > EPS_CAP
        ]
        self.idx = np.array([net.node_index[n] for n in self.node_ids], dtype=int)
        self.dim = len(self.node_ids)
        self.s = net.s[self.idx]
        self.p0 = p0[self.idx]

    def full(self, u_amb) -> np.ndarray:
        u = np.zeros(len(self.net.nodes))
        u[self.idx] = u_amb
        return u

    def balance_planes(self, active):
        """One hyperplane per component holding ambient nodes."""
        planes = []
        for comp in connected_components(self.net, active):
            mask = np.array([n in comp for n in self.node_ids], dtype=float)
            if mask.sum() == 0:
                continue
            planes.append(geo.Hyperplane.oriented(mask / np.linalg.norm(mask), 0.0))
        return planes

    def capacity_rows(self, active, lap_pinv=None):
        """(rows, link order): f_i(active, u) = rows[i] . u_amb."""
        phi, order = flow_matrix(self.net, active, lap_pinv)
        return (phi[:, self.idx] if len(order) else phi), order


def root_node(net: Network, state: NetworkState) -> tuple:
    """Ambient frame and the depth-0 node {p0} for a start state."""
    amb = _Ambient(net, state.p_array())
    region = geo.polytope_of_point(amb.p0)
    return amb, AggNode(active=frozenset(state.active), region=region)


def admissible_region(net: Network, node: AggNode, amb: _Ambient) -> geo.IncidenceGraph:
    """Lattice of the admissible controls at the node: the monotone shedding
    region of P intersected with the balance hyperplane of every component."""
    region = geo.cube_of_polytope(node.region)
    for h in amb.balance_planes(node.active):
        region = geo.section(region, h)
    return region


def _cell_planes(rows, order, net, region, tol=EPS_CAP):
    """Capacity hyperplanes that actually cross the region's interior."""
    V = region.vertex_coords()
    planes = []
    for i, lid in enumerate(order):
        row = rows[i]
        if np.linalg.norm(row) < 1e-12:
            continue
        vals = V @ row
        c = net.capacities[lid]
        for sgn in (1.0, -1.0):
            b = sgn * c
            if vals.min() < b - tol and vals.max() > b + tol:
                planes.append(geo.Hyperplane.oriented(row, b))
    # dedup coincident planes (parallel links give proportional rows)
    seen = {}
    for h in planes:
        seen.setdefault(h.key(), h)
    return list(seen.values())


def _beta_of(net, amb, rows, order, u_amb, tol=EPS_CAP):
    vals = rows @ u_amb if len(order) else np.zeros(0)
    beta = []
    for lid, f in zip(order, vals):
        c = net.capacities[lid]
        if f > c + tol:
            beta.append(1)
        elif f < -c - tol:
            beta.append(-1)
        else:
            beta.append(0)
    return tuple(beta)


def partition_controls(net: Network, node: AggNode, amb: _Ambient, lap_pinv=None, region=None) -> list:
    """Consistent partition of the admissible controls at the node."""
    if region is None:
        region = admissible_region(net, node, amb)
    rows, order = amb.capacity_rows(node.active, lap_pinv)
    g = region
    for h in _cell_planes(rows, order, net, region):
        g, _ = geo.insert_hyperplane(g, h)
    td = g.top_dim()
    cells = []
    for fid in sorted(g.layer(td)):
        closure = g.closure_of(fid)
        centroid = g.centroid(fid)
        beta = _beta_of(net, amb, rows, order, centroid)
        nxt = frozenset(lid for lid, b in zip(order, beta) if b == 0)
        cells.append(AggControl(region=closure, beta=beta, next_active=nxt))
    return cells


def _feasible_subregion(net, amb, region, rows, order):
    """Restrict a control region to |f_i| <= c_i for every listed link."""
    for i, lid in enumerate(order):
        row, c = rows[i], net.capacities[lid]
        if np.linalg.norm(row) < 1e-12:
            continue
        for sgn in (1.0, -1.0):
            vals = region.vertex_coords() @ (sgn * row)
            if vals.max() > c + EPS_CAP:
                region = geo.restrict_side(
                    region, geo.Hyperplane.oriented(sgn * row, c), -1
                )
                if not region.faces:
                    return None
    return region


def j1(net: Network, node: AggNode, amb: _Ambient, lap_pinv=None, region=None) -> tuple:
    """One-stage value: max s.u over the admissible controls whose flows stay
    within every capacity (the redispatch LP), plus the feasible cell."""
    if region is None:
        region = admissible_region(net, node, amb)
    rows, order = amb.capacity_rows(node.active, lap_pinv)
    region = _feasible_subregion(net, amb, region, rows, order)
    val, u = geo.lp_over_vertices(region, amb.s)
    return val, u, region


def node_upper_bound(node: AggNode, amb: _Ambient) -> float:
    """max s.p over cl(P): no control can end above it."""
    val, _ = geo.lp_over_vertices(node.region, amb.s)
    return val


def _fingerprint(region: geo.IncidenceGraph) -> tuple:
    V = region.vertex_coords()
    return tuple(sorted(tuple(np.round(v, 8)) for v in V))


def value_iteration(
    net: Network,
    state_or_root,
    N: int,
    verbose=False,
    stats_writer=None,
    prune=True,
) -> SearchResult:
    """Exact optimum over N control stages from the given start state.

    Iterative deepening over horizons 1..N; within a horizon, depth-first
    expansion ordered by upper bound, pruned against the incumbent, memoized
    on (active set, region fingerprint, remaining stages).
    """
    if N < 1:
        raise ValueError("N >= 1 required")
    if isinstance(state_or_root, NetworkState):
        amb, root = root_node(net, state_or_root)
    else:
        amb, root = state_or_root

    pinv_cache: dict[frozenset, np.ndarray] = {}

    def pinv_of(active, parent=None):
        if active not in pinv_cache:
            if parent is not None and parent in pinv_cache:
                pinv_cache[active] = update_pseudo_inverse(
                    pinv_cache[parent], net, parent - active, parent
                )
            else:
                pinv_cache[active] = pseudo_inverse(net, active)
        return pinv_cache[active]

    memo: dict[tuple, SearchResult] = {}
    stats = {"expanded": 0, "pruned": 0}
    incumbent = [-np.inf]

    def search(node: AggNode, remaining: int, parent_active=None) -> SearchResult:
        key = (node.active, _fingerprint(node.region), remaining)
        if key in memo:
            return memo[key]
        lp = pinv_of(node.active, parent_active)
        ub = node_upper_bound(node, amb)
        region = admissible_region(net, node, amb)
        v1, u1, term = j1(net, node, amb, lap_pinv=lp, region=region)
        base = SearchResult(v1, [], term, u1)
        if remaining == 1 or v1 >= ub - 1e-12:
            memo[key] = base
            return base
        stats["expanded"] += 1
        best = base
        children = partition_controls(net, node, amb, lap_pinv=lp, region=region)
        scored = []
        for ctl in children:
            cub, _ = geo.lp_over_vertices(ctl.region, amb.s)
            scored.append((cub, ctl))
        scored.sort(key=lambda t: -t[0])
        for cub, ctl in scored:
            if prune and cub <= max(incumbent[0], best.value) + 1e-12:
                stats["pruned"] += 1
                continue
            child = AggNode(
                active=ctl.next_active, region=ctl.region, beta=ctl.beta,
                depth=node.depth + 1, upper_bound=cub,
            )
            sub = search(child, remaining - 1, parent_active=node.active)
            if sub.value > best.value + 1e-12:
                best = SearchResult(
                    sub.value, [ctl] + sub.controls, sub.terminal_region, sub.terminal_u
                )
        memo[key] = best
        return best

    per_depth = {}
    best_res = None
    for horizon in range(1, N + 1):
        stats = {"expanded": 0, "pruned": 0}
        res = search(root, horizon)
        if best_res is None or res.value > best_res.value + 1e-12:
            best_res = res
        incumbent[0] = max(incumbent[0], res.value)
        # the optimum is nondecreasing in the horizon (hold a feasible state)
        per_depth[horizon] = incumbent[0]
        if verbose or stats_writer is not None:
            line = f"{horizon},{stats['expanded']},{stats['pruned']},{incumbent[0]:.6g}"
            if stats_writer is not None:
                stats_writer.write(line + "\n")
            else:
                print("depth,expanded,pruned,incumbent:", line)
    best_res.value = per_depth[N]
    best_res.per_depth = per_depth
    best_res.requested = N
    return best_res


# -- concrete control retrieval ---------------------------------------------


def _magnitude_floor_planes(amb: _Ambient, target):
    """Halfspaces sign(p0_v) p_v >= sign(p0_v) target_v (room to shed to target)."""
    planes = []
    for v in range(amb.dim):
        sgn = 1.0 if amb.p0[v] >= 0 else -1.0
        if abs(target[v]) <= EPS_CAP:
            continue  # any p_v admits shedding to ~0
        n = np.zeros(amb.dim)
        n[v] = sgn
        planes.append((geo.Hyperplane.oriented(n, sgn * target[v]), 1))
    return planes


def _shrink_into(region: geo.IncidenceGraph, planes):
    """Centroid of the sub-polytope of `region` obeying the extra halfspaces
    (None when it is empty).  The centroid keeps balance exactly and sits
    strictly inside every region facet the halfspaces do not pin it to."""
    g = region
    for h, keep in planes:
        vals = (g.vertex_coords() @ np.asarray(h.normal)) - h.offset
        if (keep * vals).min() >= -1e-12:
            continue  # already satisfied everywhere
        if (keep * vals).max() < -1e-12:
            return None  # no room at all
        g = geo.restrict_side(g, h, keep)
        if not g.faces:
            return None
    return g.centroid(g.top_faces()[0])


def retrieve_control(net: Network, result: SearchResult, epsilon: float, state=None):
    """Concrete control sequence within epsilon of the aggregated optimum.

    Walks the optimal cell sequence backwards, picking interior points with
    enough monotone-shedding room for the next stage, then verifies by
    simulating through the raw dynamics (the active-set sequence must match
    the aggregated path exactly).  Only the last stage leaks value, so only
    the terminal point is nudged off the optimal vertex; the nudge shrinks
    geometrically within the epsilon budget until the simulation certifies.
    """
    if epsilon <= 0:
        raise ValueError("epsilon > 0 required")
    if state is None:
        raise ValueError("pass the start state")
    amb = _Ambient(net, state.p_array())
    cells = result.controls
    n_stages = len(cells) + 1
    span = max(1.0, float(np.abs(amb.p0).sum()))
    budget = min(0.25, 0.5 * epsilon / span)  # value loss <= lam * span
    term = result.terminal_region
    tc = term.centroid(term.top_faces()[0])

    for lam in (budget, budget / 4, budget / 16, budget / 256, 0.0):
        u_seq = [None] * n_stages
        u_seq[-1] = (1.0 - lam) * result.terminal_u + lam * tc
        ok = True
        for t in range(n_stages - 2, -1, -1):
            u_seq[t] = _shrink_into(
                cells[t].region, _magnitude_floor_planes(amb, u_seq[t + 1])
            )
            if u_seq[t] is None:
                ok = False
                break
        if not ok:
            continue
        while len(u_seq) < max(result.requested, n_stages):
            u_seq.append(u_seq[-1])  # hold the feasible terminal state
        controls = [amb.full(u) for u in u_seq]
        if _certify(net, state, controls, cells, result.value, epsilon):
            return controls
    raise RetrievalFailed("no interior realization found; cells too thin for epsilon")


def _certify(net, state, controls, cells, value, epsilon) -> bool:
    cur = state
    try:
        for t, u in enumerate(controls):
            nxt = failure_step(net, cur, u)
            if t < len(cells) and nxt.active != cells[t].next_active:
                return False
            cur = nxt
    except Exception:
        return False
    if not is_feasible(net, cur):
        return False
    return float(net.s @ np.asarray(controls[-1])) >= value - epsilon


# -- oracles -----------------------------------------------------------------


def _component_grids(net: Network, state: NetworkState, n0: int):
    """Per-stage control grid of U(active, p): per component, grid all free
    coordinates but one and solve the last from balance."""
    p = state.p_array()
    comps = connected_components(net, state.active)
    axes = []
    for comp in comps:
        idx = [
            net.node_index[n]
            for n in comp
            if net.roles[n] != "transmission" and abs(p[net.node_index[n]]) > EPS_CAP
        ]
        if not idx:
            continue
        axes.append(idx)
    grids = [np.zeros((1, len(net.nodes)))]
    for idx in axes:
        free, last = idx[:-1], idx[-1]
        mesh = [np.linspace(0.0, p[i], n0) for i in free]
        pts = (
            np.stack(np.meshgrid(*mesh, indexing="ij"), axis=-1).reshape(-1, len(free))
            if free
            else np.zeros((1, 0))
        )
        lastvals = -pts.sum(axis=1)
        lo, hi = min(0.0, p[last]), max(0.0, p[last])
        keep = (lastvals >= lo - EPS_CAP) & (lastvals <= hi + EPS_CAP)
        pts, lastvals = pts[keep], lastvals[keep]
        block = np.zeros((len(pts), len(net.nodes)))
        block[:, free] = pts
        block[:, last] = lastvals
        g = grids[0]
        grids = [(g[:, None, :] + block[None, :, :]).reshape(-1, len(net.nodes))]
    return grids[0]


def baseline_discretized_search(net: Network, state: NetworkState, N: int, n0: int) -> float:
    """Grid-search lower bound on the N-stage optimum (test oracle).

    Discretizes the admissible set at every stage and simulates the dynamics;
    memoizes on (active set, rounded injections, remaining stages).
    """
    if n0 < 2:
        raise ValueError("n0 >= 2 required")
    memo: dict[tuple, float] = {}

    def rec(st: NetworkState, remaining: int) -> float:
        key = (st.active, tuple(np.round(st.p, 9)), remaining)
        if key in memo:
            return memo[key]
        rows, order = flow_matrix(net, st.active)
        caps = np.array([net.capacities[l] for l in order])
        U = _component_grids(net, st, n0)
        F = U @ rows.T if len(order) else np.zeros((len(U), 0))
        fits = (
            np.all(np.abs(F) <= caps[None, :] + EPS_CAP, axis=1)
            if len(order)
            else np.ones(len(U), dtype=bool)
        )
        vals = U @ net.s
        best = float(vals[fits].max()) if fits.any() else -np.inf
        if remaining > 1:
            for u, f in zip(U, F):
                survivors = frozenset(
                    lid for lid, fv in zip(order, f) if abs(fv) <= net.capacities[lid] + EPS_CAP
                )
                if survivors == st.active:
                    continue  # feasible hold is already covered by `best`
                sub = rec(NetworkState.make(net, survivors, u), remaining - 1)
                best = max(best, sub)
        memo[key] = best
        return best

    return rec(state, N)


def constant_restricted_value(net: Network, state: NetworkState, N: int) -> tuple:
    """Exact optimum over constant controls (shed once at t=0, hold).

    Partitions the admissible set by the capacity planes of the current
    topology, recurses on each cell with the surviving links (re-imposing the
    balance of every new component, since a constant control must stay
    admissible along the whole trajectory), and maximizes s.u over the
    terminally feasible cells.  Returns (value, maximizer).
    """
    amb, root = root_node(net, state)
    region0 = admissible_region(net, root, amb)
    best = [-np.inf, None]

    def rec(active, region, stage):
        for h in amb.balance_planes(active):
            region = geo.section(region, h)
            if not region.faces:
                return  # no constant control in this cell stays balanced
        rows, order = amb.capacity_rows(active)
        if stage == N - 1:
            g = _feasible_subregion(net, amb, region, rows, order)
            if g is None or not g.faces:
                return
            val, u = geo.lp_over_vertices(g, amb.s)
            if val > best[0]:
                best[0], best[1] = val, amb.full(u)
            return
        g = region
        for h in _cell_planes(rows, order, net, region):
            g, _ = geo.insert_hyperplane(g, h)
        td = g.top_dim()
        for fid in sorted(g.layer(td)):
            closure = g.closure_of(fid)
            beta = _beta_of(net, amb, rows, order, g.centroid(fid))
            nxt = frozenset(lid for lid, b in zip(order, beta) if b == 0)
            if nxt == active:
                # no failure: the whole cell is already terminally feasible
                val, u = geo.lp_over_vertices(closure, amb.s)
                if val > best[0]:
                    best[0], best[1] = val, amb.full(u)
            else:
                rec(nxt, closure, stage + 1)

    rec(frozenset(state.active), region0, 0)
    return best[0], best[1]
