"""Network model and DC power flow.

Lossless DC approximation: the grid is an undirected multigraph with link
weights w (negative susceptance, per-unit) and thermal capacities c.  For a
balanced injection vector p the link flows are

    f = W A^T L^+ p,      L = A W A^T  (weighted Laplacian),

where A is the node-link incidence matrix for the active link set and L^+ the
Moore-Penrose pseudo-inverse.  Flows are linear in p for a fixed active set
and independent of the (arbitrary) link direction convention.

The pseudo-inverse is computed by grounding one reference node per connected
component, inverting the reduced Laplacian, extending by zeros and re-centering
per component; this is exact and fast at the network sizes handled here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EPS_NUM = 1e-9  # balance / flow-conservation tolerance (per-unit data)

SUPPLY = "supply"
DEMAND = "demand"
TRANSMISSION = "transmission"


class UnbalancedInjection(ValueError):
    """Injections do not sum to zero on some connected component."""


@dataclass(frozen=True)
class Link:
    lid: str
    tail: str
    head: str


class Network:
    """Immutable multigraph with weights, capacities and node roles.

    Nodes and links keep the order in which they were supplied; parallel links
    are allowed, self-loops are not.  Weights and capacities must be strictly
    positive.
    """

    def __init__(self, nodes, links, weights, capacities, roles):
        self.nodes = tuple(str(n) for n in nodes)
        self.links = tuple(Link(str(l[0]), str(l[1]), str(l[2])) for l in links)
        self.weights = {str(k): float(v) for k, v in weights.items()}
        self.capacities = {str(k): float(v) for k, v in capacities.items()}
        self.roles = {str(k): str(v) for k, v in roles.items()}
        self._validate()
        self.node_index = {n: i for i, n in enumerate(self.nodes)}
        self.link_index = {l.lid: i for i, l in enumerate(self.links)}
        # sign vector: +1 on supplies, -1 on demands, 0 on transmission nodes
        self.s = np.array(
            [{SUPPLY: 1.0, DEMAND: -1.0, TRANSMISSION: 0.0}[self.roles[n]] for n in self.nodes]
        )
        self.w = np.array([self.weights[l.lid] for l in self.links])
        self.c = np.array([self.capacities[l.lid] for l in self.links])

    def _validate(self):
        seen = set()
        for l in self.links:
            if l.tail == l.head:
                raise ValueError(f"self-loop on link {l.lid}")
            if l.lid in seen:
                raise ValueError(f"duplicate link id {l.lid}")
            seen.add(l.lid)
            if l.tail not in self.nodes or l.head not in self.nodes:
                raise ValueError(f"link {l.lid} references unknown node")
        for l in self.links:
            if self.weights.get(l.lid, 0.0) <= 0.0:
                raise ValueError(f"nonpositive weight on link {l.lid}")
            if self.capacities.get(l.lid, 0.0) <= 0.0:
                raise ValueError(f"nonpositive capacity on link {l.lid}")
        for n in self.nodes:
            if self.roles.get(n) not in (SUPPLY, DEMAND, TRANSMISSION):
                raise ValueError(f"bad role for node {n}")

    # -- role shortcuts -------------------------------------------------
    @property
    def supply_nodes(self):
        return tuple(n for n in self.nodes if self.roles[n] == SUPPLY)

    @property
    def demand_nodes(self):
        return tuple(n for n in self.nodes if self.roles[n] == DEMAND)

    @property
    def sd_nodes(self):
        """Non-transmission nodes, in node order."""
        return tuple(n for n in self.nodes if self.roles[n] != TRANSMISSION)

    def all_links(self):
        return frozenset(l.lid for l in self.links)

    def incidence_column(self, lid):
        col = np.zeros(len(self.nodes))
        l = self.links[self.link_index[lid]]
        col[self.node_index[l.tail]] = 1.0
        col[self.node_index[l.head]] = -1.0
        return col

    def p_vector(self, injections):
        """Dense injection vector from a node->value mapping (missing = 0)."""
        p = np.zeros(len(self.nodes))
        for n, v in injections.items():
            p[self.node_index[str(n)]] = float(v)
        return p


@dataclass(frozen=True)
class FlowSolution:
    """Signed link flows (direction convention of the input) plus the node
    partition into connected components of the active subgraph."""

    flows: dict
    components: tuple


def connected_components(net: Network, active) -> tuple:
    """Partition of the node set induced by the active links (union-find)."""
    parent = list(range(len(net.nodes)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for lid in active:
        l = net.links[net.link_index[lid]]
        a, b = find(net.node_index[l.tail]), find(net.node_index[l.head])
        if a != b:
            parent[a] = b
    groups = {}
    for i, n in enumerate(net.nodes):
        groups.setdefault(find(i), []).append(n)
    return tuple(frozenset(g) for g in groups.values())


def is_balanced(net: Network, active, p, eps=EPS_NUM) -> bool:
    """True iff p sums to ~0 on every connected component of the active set."""
    for comp in connected_components(net, active):
        if abs(sum(p[net.node_index[n]] for n in comp)) > eps:
            return False
    return True


def _laplacian(net: Network, active):
    n = len(net.nodes)
    L = np.zeros((n, n))
    for lid in active:
        l = net.links[net.link_index[lid]]
        i, j = net.node_index[l.tail], net.node_index[l.head]
        w = net.weights[lid]
        L[i, i] += w
        L[j, j] += w
        L[i, j] -= w
        L[j, i] -= w
    return L


def pseudo_inverse(net: Network, active) -> np.ndarray:
    """Moore-Penrose pseudo-inverse of the weighted Laplacian on `active`.

    Grounds one node per component, inverts the reduced Laplacian, extends by
    zeros, then centers per component so the result equals the true
    pseudo-inverse (L L^+ p = p for balanced p).
    """
    n = len(net.nodes)
    if not active:
        return np.zeros((n, n))
    L = _laplacian(net, active)
    comps = connected_components(net, active)
    G = np.zeros((n, n))
    for comp in comps:
        idx = sorted(net.node_index[v] for v in comp)
        if len(idx) == 1:
            continue
        keep = idx[1:]  # ground idx[0]
        sub = L[np.ix_(keep, keep)]
        G[np.ix_(keep, keep)] = np.linalg.inv(sub)
    return _center_components(G, comps, net)


def _center_components(G, comps, net):
    # Q G Q with Q the per-component centering projector.
    n = G.shape[0]
    Q = np.eye(n)
    for comp in comps:
        idx = [net.node_index[v] for v in comp]
        Q[np.ix_(idx, idx)] -= 1.0 / len(idx)
    return Q @ G @ Q


def update_pseudo_inverse(prev, net: Network, removed, active_before) -> np.ndarray:
    """Pseudo-inverse after removing `removed` from `active_before`.

    Uses a Woodbury-type low-rank downdate while the removal preserves the
    component structure; falls back to a full recomputation when the removal
    disconnects a component (rank change).
    """
    removed = frozenset(removed)
    if not removed:
        return prev
    active_after = frozenset(active_before) - removed
    if len(connected_components(net, active_after)) != len(
        connected_components(net, active_before)
    ):
        return pseudo_inverse(net, active_after)
    U = np.column_stack([net.incidence_column(lid) for lid in sorted(removed)])
    w = np.array([net.weights[lid] for lid in sorted(removed)])
    # L' = L - U diag(w) U^T ; ranges are unchanged, so Woodbury applies on L^+.
    C = np.diag(1.0 / w) - U.T @ prev @ U
    if abs(np.linalg.det(C)) < 1e-12:
        return pseudo_inverse(net, active_after)
    return prev + prev @ U @ np.linalg.solve(C, U.T @ prev)


def flow_matrix(net: Network, active, lap_pinv=None) -> tuple:
    """Rows phi_i with f_i(active, p) = phi_i . p, plus the active link order."""
    order = [l.lid for l in net.links if l.lid in set(active)]
    if lap_pinv is None:
        lap_pinv = pseudo_inverse(net, active)
    if not order:
        return np.zeros((0, len(net.nodes))), order
    rows = []
    for lid in order:
        rows.append(net.weights[lid] * net.incidence_column(lid) @ lap_pinv)
    return np.array(rows), order


def compute_flow(net: Network, active, p, lap_pinv=None, eps=EPS_NUM) -> FlowSolution:
    """Unique DC flow for a balanced injection vector on the active subgraph."""
    p = np.asarray(p, dtype=float)
    comps = connected_components(net, active)
    for comp in comps:
        tot = sum(p[net.node_index[n]] for n in comp)
        if abs(tot) > eps:
            raise UnbalancedInjection(
                f"component {sorted(comp)} carries net injection {tot:.3e}"
            )
    phi, order = flow_matrix(net, active, lap_pinv)
    vals = phi @ p if len(order) else np.zeros(0)
    return FlowSolution(flows={lid: float(v) for lid, v in zip(order, vals)}, components=comps)
