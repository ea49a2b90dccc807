"""Projection-based approximation: search in a control subspace.

Controls are restricted to the span of chosen orthonormal directions over the
non-transmission coordinates; the aggregated search then runs in the reduced
dimension, giving a lower bound on the exact optimum.  With a single
direction the aggregated states are intervals on a line through the origin,
so the search degenerates to interval splitting by the capacity thresholds
and runs in linear time per stage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .aggregation import SearchResult, root_node, value_iteration as _full_vi
from .cascade import EPS_CAP, NetworkState
from .network import Network, connected_components, flow_matrix


@dataclass(frozen=True)
class ProjectionSpec:
    """Orthonormal direction matrix over the non-transmission coordinates and
    the index set of directions the control may use (the rest are pinned to
    zero)."""

    basis: tuple  # rows: directions over sd-node coordinates
    active_index_set: tuple  # indices into basis rows
    sd_nodes: tuple  # coordinate order

    def __post_init__(self):
        B = np.array(self.basis)
        if B.size and np.abs(B @ B.T - np.eye(len(B))).max() > 1e-10:
            raise ValueError("basis not orthonormal")


def eta_family(net: Network, eta: float) -> ProjectionSpec:
    """One-direction family blending the two supply-to-load transfer patterns
    of a single-supply, two-load network; eta weights the first load."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta in [0, 1] required")
    supplies = net.supply_nodes
    demands = net.demand_nodes
    if len(supplies) != 1 or len(demands) != 2:
        raise ValueError("the eta family needs one supply and two demand nodes")
    sd = net.sd_nodes
    idx = {n: i for i, n in enumerate(sd)}
    d1, d2 = sorted(demands, key=lambda n: net.node_index[n])
    v = np.zeros(len(sd))
    v[idx[supplies[0]]] = 1.0
    v[idx[d1]] -= eta
    v[idx[d2]] -= 1.0 - eta
    v = v / np.linalg.norm(v)
    return ProjectionSpec(basis=(tuple(v),), active_index_set=(0,), sd_nodes=tuple(sd))


def _direction_in_full(net: Network, spec: ProjectionSpec) -> np.ndarray:
    u = np.zeros(len(net.nodes))
    for x, n in zip(np.array(spec.basis)[spec.active_index_set[0]], spec.sd_nodes):
        u[net.node_index[n]] = x
    return u


def projected_search(
    net: Network, state: NetworkState, N: int, spec: ProjectionSpec
) -> SearchResult:
    """Optimum over controls confined to the spanned subspace.

    Single-direction specs run on the interval specialization; larger index
    sets fall back to the full lattice search with the complement directions
    inserted as section constraints.
    """
    if len(spec.active_index_set) == 1 and len(spec.basis) == 1:
        return _line_search(net, state, N, spec)
    return _subspace_search(net, state, N, spec)


def _line_search(net: Network, state: NetworkState, N: int, spec: ProjectionSpec):
    """Interval aggregation along u = lam * phi, lam >= 0."""
    phi = _direction_in_full(net, spec)
    p0 = state.p_array()
    if float(net.s @ phi) < 0:
        phi = -phi  # shed along the payoff-positive orientation
    sval = float(net.s @ phi)
    # monotone box: lam * phi within [min(0,p0), max(0,p0)] componentwise
    lam_cap = np.inf
    for v in range(len(p0)):
        if abs(phi[v]) < 1e-14:
            continue
        hi = max(0.0, p0[v]) / phi[v] if phi[v] > 0 else min(0.0, p0[v]) / phi[v]
        lo = min(0.0, p0[v]) / phi[v] if phi[v] > 0 else max(0.0, p0[v]) / phi[v]
        if lo > EPS_CAP:
            lam_cap = 0.0  # direction leaves the shedding box immediately
        lam_cap = min(lam_cap, hi)
    memo = {}

    def balanced_scale(active):
        """Largest admissible slab [0, cap] for the balance constraints: the
        direction either sums to zero on every component or is pinned."""
        for comp in connected_components(net, active):
            tot = sum(phi[net.node_index[n]] for n in comp)
            if abs(tot) > 1e-9:
                return 0.0
        return np.inf

    def rec(active, lam_hi, remaining):
        key = (active, round(lam_hi, 12), remaining)
        if key in memo:
            return memo[key]
        lam_hi = min(lam_hi, balanced_scale(active))
        rows, order = flow_matrix(net, active)
        caps = np.array([net.capacities[l] for l in order])
        f1 = rows @ phi if len(order) else np.zeros(0)
        # terminal value on this topology: largest feasible lam
        lam_feas = lam_hi
        for f, c in zip(f1, caps):
            if abs(f) > 1e-12:
                lam_feas = min(lam_feas, c / abs(f))
        best = max(0.0, lam_feas) * sval
        best_lam = max(0.0, lam_feas)
        if remaining > 1 and lam_hi > EPS_CAP:
            pts = sorted(
                {c / abs(f) for f, c in zip(f1, caps) if abs(f) > 1e-12 and c / abs(f) < lam_hi}
            )
            edges = [0.0] + pts + [lam_hi]
            for a, b in zip(edges, edges[1:]):
                if b - a <= 1e-12:
                    continue
                mid = 0.5 * (a + b)
                nxt = frozenset(
                    l for l, f in zip(order, f1) if abs(mid * f) <= net.capacities[l] + EPS_CAP
                )
                if nxt == active:
                    continue  # stable slab: already covered by lam_feas
                sub, sub_lam = rec(nxt, b, remaining - 1)
                if sub > best + 1e-15:
                    best, best_lam = sub, sub_lam
        memo[key] = (best, best_lam)
        return memo[key]

    per_depth = {}
    best_overall = 0.0
    for t in range(1, N + 1):
        memo.clear()
        v, lam = rec(frozenset(state.active), lam_cap, t)
        best_overall = max(best_overall, v)
        per_depth[t] = best_overall
    res = SearchResult(
        value=per_depth[N], controls=[], terminal_region=None,
        terminal_u=None, per_depth=per_depth, requested=N,
    )
    return res


def _subspace_search(net: Network, state: NetworkState, N: int, spec: ProjectionSpec):
    """Full lattice search with the complement directions pinned to zero."""
    amb, root = root_node(net, state)
    B = np.array(spec.basis)
    idx = {n: i for i, n in enumerate(spec.sd_nodes)}
    pins = []
    for i in range(len(B)):
        if i in spec.active_index_set:
            continue
        n_amb = np.zeros(amb.dim)
        for j, node in enumerate(amb.node_ids):
            n_amb[j] = B[i][idx[node]]
        if np.linalg.norm(n_amb) < 1e-12:
            continue
        pins.append(geo.Hyperplane.oriented(n_amb / np.linalg.norm(n_amb), 0.0))
    if pins:
        # the pins constrain the controls, not the start state: extend the
        # balance sections applied inside every admissible region
        base_planes = amb.balance_planes

        def patched_planes(active):
            return base_planes(active) + pins

        amb.balance_planes = patched_planes
    return _full_vi(net, (amb, root), N)
