"""Controlled cascading-failure dynamics.

State: (active link set, injection vector p).  A control u is an injection
vector obtained from p by monotone load shedding: componentwise between 0 and
p, and balanced on every component of the active set.  One step of the
dynamics applies u, then removes every active link whose flow magnitude
exceeds its capacity; a link at |f| = c survives (closed rule, additive slack
EPS_CAP).

A state is feasible when it is invariant under the failure rule.  After the
cascade stops, subsequent epochs hold the state frozen.  In the uncontrolled
dynamics (u = p) a component whose injections became unbalanced through a
split is shed to zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import (
    EPS_NUM,
    Network,
    compute_flow,
    connected_components,
)

EPS_CAP = 1e-9  # additive slack on capacity comparisons


class InadmissibleControl(ValueError):
    """Control violates monotone shedding bounds or component balance."""


@dataclass(frozen=True)
class NetworkState:
    active: frozenset
    p: tuple  # injection vector, aligned with net.nodes

    @staticmethod
    def make(net: Network, active, p) -> "NetworkState":
        return NetworkState(frozenset(active), tuple(float(x) for x in np.asarray(p)))

    def p_array(self) -> np.ndarray:
        return np.array(self.p)


@dataclass(frozen=True)
class ControlBox:
    """Componentwise shedding bounds: lower_v = min(0, p_v), upper_v = max(0, p_v)."""

    lower: tuple
    upper: tuple

    @staticmethod
    def of(p) -> "ControlBox":
        p = np.asarray(p, dtype=float)
        return ControlBox(tuple(np.minimum(p, 0.0)), tuple(np.maximum(p, 0.0)))

    def contains(self, u, eps=EPS_CAP) -> bool:
        u = np.asarray(u, dtype=float)
        return bool(
            np.all(u >= np.array(self.lower) - eps) and np.all(u <= np.array(self.upper) + eps)
        )


@dataclass(frozen=True)
class AdmissibleSet:
    """Symbolic description of the admissible controls at a state: the
    shedding box intersected with one balance hyperplane per component."""

    box: ControlBox
    balance_groups: tuple  # per component: frozenset of nodes with a nonzero box range

    @property
    def is_zero(self) -> bool:
        """True iff the set collapses to {0} (no component holds both signs)."""
        lo, up = np.array(self.box.lower), np.array(self.box.upper)
        for group in self.balance_groups:
            has_pos = any(up[i] > EPS_CAP for i in group)
            has_neg = any(lo[i] < -EPS_CAP for i in group)
            if has_pos and has_neg:
                return False
        return True


def admissible_set(net: Network, state: NetworkState) -> AdmissibleSet:
    """Describe U(active, p) = shedding box of p intersected with per-component
    balance; the box collapses a coordinate to {0} wherever p_v = 0."""
    box = ControlBox.of(state.p)
    groups = []
    for comp in connected_components(net, state.active):
        idx = frozenset(
            net.node_index[n]
            for n in comp
            if abs(state.p[net.node_index[n]]) > EPS_CAP
        )
        groups.append(idx)
    return AdmissibleSet(box=box, balance_groups=tuple(g for g in groups if g))


def is_admissible(net: Network, state: NetworkState, u, eps=EPS_CAP) -> bool:
    u = np.asarray(u, dtype=float)
    if not ControlBox.of(state.p).contains(u, eps):
        return False
    for comp in connected_components(net, state.active):
        if abs(sum(u[net.node_index[n]] for n in comp)) > max(eps, EPS_NUM):
            return False
    return True


def failure_step(net: Network, state: NetworkState, u, lap_pinv=None) -> NetworkState:
    """One step of the controlled dynamics: apply u, drop overloaded links."""
    u = np.asarray(u, dtype=float)
    if not is_admissible(net, state, u):
        raise InadmissibleControl("control outside U(active, p)")
    sol = compute_flow(net, state.active, u, lap_pinv=lap_pinv)
    survivors = frozenset(
        lid for lid, f in sol.flows.items() if abs(f) <= net.capacities[lid] + EPS_CAP
    )
    return NetworkState.make(net, survivors, u)


def is_feasible(net: Network, state: NetworkState) -> bool:
    """True iff p is balanced per component and every active flow is within
    capacity; such states are invariant under the failure rule."""
    p = state.p_array()
    for comp in connected_components(net, state.active):
        if abs(sum(p[net.node_index[n]] for n in comp)) > EPS_NUM:
            return False
    sol = compute_flow(net, state.active, p)
    return all(abs(f) <= net.capacities[lid] + EPS_CAP for lid, f in sol.flows.items())


def _rebalanced(net: Network, state: NetworkState) -> np.ndarray:
    """u = p with any unbalanced component shed to zero (post-split rule)."""
    u = state.p_array().copy()
    for comp in connected_components(net, state.active):
        idx = [net.node_index[n] for n in comp]
        if abs(u[idx].sum()) > EPS_NUM:
            u[idx] = 0.0
    return u


def is_feasible_sequence(net: Network, state: NetworkState, controls) -> bool:
    """True iff the control sequence is feasible end to end: admissible at
    every stage and no link fails when the last control is applied."""
    from .network import UnbalancedInjection

    st = state
    try:
        for t, u in enumerate(controls):
            nxt = failure_step(net, st, u)
            if t == len(controls) - 1 and nxt.active != st.active:
                return False
            st = nxt
    except (InadmissibleControl, UnbalancedInjection):
        return False
    return True


def run_uncontrolled(net: Network, state: NetworkState, horizon=None) -> list:
    """Iterate the dynamics under u = p (zeroing unbalanced components) until a
    fixpoint or the horizon; returns the visited states, initial included."""
    if horizon is None:
        horizon = len(net.links) + 1
    states = [state]
    for _ in range(horizon):
        u = _rebalanced(net, states[-1])
        nxt = failure_step(net, states[-1], u)
        if nxt.active == states[-1].active and np.allclose(u, states[-1].p_array()):
            break
        states.append(nxt)
        if is_feasible(net, nxt):
            break
    return states
