"""Analytic solvers: parallel networks, tree reduction, constant/one-shot control.

Parallel networks (two nodes joined by parallel links) fail in a fixed order:
with links sorted by weight/capacity ascending, the supportable throughput of
the first i links is R_i = (c_i/w_i) * sum_{j<=i} w_j, and the running-argmax
record points of R determine the optimal one-shot control in closed form.

A network is tree reducible when contracting every two-terminal subnetwork
whose interior holds no supply/demand node turns it into a tree.  The optimal
constant control then decomposes: every reduced-tree link i carries a scalar
throughput z_i whose feasible values (an interval union, computed by a
one-dimensional aggregated cascade sweep) bound the local problems; the local
value functions are piecewise tents, combined leaf-to-root by sup-convolution
and instantiated root-to-leaves by the proportional water-filling split.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tents
from .cascade import EPS_CAP, NetworkState, run_uncontrolled
from .network import Network, connected_components, flow_matrix
from .tents import PiecewiseTent, merge_intervals, intersect_unions


class NotTreeReducible(ValueError):
    pass


# -- parallel networks --------------------------------------------------------


@dataclass(frozen=True)
class ParallelProfile:
    """Links of a two-node parallel network sorted by w/c ascending."""

    lids: tuple
    w: tuple
    c: tuple
    R: tuple  # supportable throughput with the first i+1 links active
    records: tuple  # indices (1-based) of the running argmax of R, decreasing R

    @staticmethod
    def of(weights, capacities, lids=None) -> "ParallelProfile":
        n = len(weights)
        lids = tuple(lids) if lids is not None else tuple(f"e{i+1}" for i in range(n))
        order = sorted(range(n), key=lambda i: weights[i] / capacities[i])
        w = [float(weights[i]) for i in order]
        c = [float(capacities[i]) for i in order]
        ids = tuple(lids[i] for i in order)
        R = []
        acc = 0.0
        for i in range(n):
            acc += w[i]
            R.append(c[i] / w[i] * acc)
        records = []
        start = 0
        while start < n:
            best = max(range(start, n), key=lambda i: (R[i], i))
            records.append(best + 1)  # 1-based prefix length
            start = best + 1
        return ParallelProfile(ids, tuple(w), tuple(c), tuple(R), tuple(records))

    def uncontrolled_prefixes(self, p0: float) -> list:
        """Prefix lengths [l_0=|E|, l_1, ...] visited under constant p0."""
        seq = [len(self.w)]
        while True:
            l = seq[-1]
            if l == 0:
                break
            W = sum(self.w[:l])
            survivors = sum(1 for i in range(l) if p0 * self.w[i] / W <= self.c[i] + EPS_CAP)
            if survivors == l:
                break
            seq.append(survivors)
        return seq

    def stage_thresholds(self, p0: float, N: int) -> list:
        """N_j(p0) for every record index j (1-based list)."""
        prefixes = self.uncontrolled_prefixes(p0)
        m = len(self.records)
        # j window: R_{o_{j+1}} < p0 <= R_{o_j}
        Rrec = [np.inf] + [self.R[o - 1] for o in self.records] + [0.0]
        jwin = 0
        for j in range(m + 1):
            hi = Rrec[j]
            lo = Rrec[j + 1]
            if lo < p0 <= hi:
                jwin = j
                break
        out = []
        for k in range(1, m + 1):
            if k <= jwin:
                # first uncontrolled stage already feasible for p0
                t = next(
                    (
                        t
                        for t, l in enumerate(prefixes)
                        if l > 0 and p0 <= self.R[l - 1] + EPS_CAP
                    ),
                    None,
                )
                out.append(np.inf if t is None else t + 1)
            else:
                o = self.records[k - 1]
                t = next(t for t, l in enumerate(prefixes) if l <= o)
                out.append(t + 1)
        return out

    def link_flows(self, prefix_len: int, p0: float) -> dict:
        W = sum(self.w[:prefix_len])
        return {
            self.lids[i]: p0 * self.w[i] / W for i in range(prefix_len)
        }

    def step(self, prefix_len: int, z: float) -> int:
        """Surviving prefix length after one failure step under throughput z."""
        if prefix_len == 0:
            return 0
        W = sum(self.w[:prefix_len])
        return sum(
            1 for i in range(prefix_len) if abs(z) * self.w[i] / W <= self.c[i] + EPS_CAP
        )

    def sequence_feasible(self, p0: float, levels) -> bool:
        """True iff the monotone level sequence is a feasible control: no link
        failure when the last level is applied (and z = 0 once disconnected)."""
        l = len(self.w)
        for t, z in enumerate(levels):
            if t > 0 and z > levels[t - 1] + EPS_CAP:
                return False
            if l == 0 and abs(z) > EPS_CAP:
                return False
            nxt = self.step(l, z)
            if t == len(levels) - 1 and nxt != l:
                return False
            l = nxt
        return True


def parallel_optimal(profile: ParallelProfile, p0: float, N: int) -> list:
    """Optimal one-shot throughput sequence for a parallel network.

    The optimum sheds once, at some stage t1, to a record level of the prefix
    profile reached by the uncontrolled cascade: the terminal value of any
    feasible control is dominated by min(p0, R_i) for a surviving prefix i,
    and raising a feasible shed level to the covering record of the current
    prefix stays feasible.  Each candidate stage/level pair is certified by
    prefix simulation (the post-shed cascade may need several steps to
    settle, so closed-form stage formulas are checked rather than trusted).
    """
    if p0 <= 0 or N < 1:
        raise ValueError("p0 > 0 and N >= 1 required")
    best = [p0] * max(0, N - 1) + [0.0]  # total shedding is always feasible
    best_val = 0.0
    l = len(profile.w)
    for t1 in range(N):
        if t1 > 0:
            l = profile.step(l, p0)  # uncontrolled prefix at stage t1
        by_R = sorted(range(l), key=lambda i: -profile.R[i])
        for i in by_R:
            level = min(profile.R[i], p0)
            if level <= best_val + EPS_CAP:
                break  # no remaining candidate at this stage can win
            levels = [p0] * t1 + [level] * (N - t1)
            if profile.sequence_feasible(p0, levels):
                best, best_val = levels, level
                break
    return best


# -- tree reduction -----------------------------------------------------------


@dataclass
class ReducibleComponent:
    """Two-terminal subnetwork with transmission-only interior."""

    terminals: tuple  # (child-side node, parent-side node) once oriented
    lids: frozenset
    interior: frozenset


@dataclass
class ReducedTree:
    """Reduced tree: node 0 is the root; labels follow a reverse topological
    order (children carry larger labels than their parents)."""

    net: Network
    labels: list  # tree label -> network node id
    parent: dict  # tree label -> tree label (root absent)
    children: dict  # tree label -> list of labels
    components: dict  # child label -> ReducibleComponent toward its parent
    zero_flow_links: frozenset  # links that can never carry flow (dangling)

    @property
    def order(self):
        return range(len(self.labels))

    def node_of(self, label):
        return self.labels[label]


def _transmission_pieces(net: Network, active, sd_nodes):
    """Connected transmission-only pieces and the terminals they attach to."""
    sd = set(sd_nodes)
    adj: dict[str, list] = {n: [] for n in net.nodes}
    for lid in active:
        l = net.links[net.link_index[lid]]
        adj[l.tail].append((lid, l.head))
        adj[l.head].append((lid, l.tail))
    seen = set()
    pieces = []
    for start in net.nodes:
        if start in sd or start in seen or not adj[start]:
            continue
        stack, nodes, lids, terms = [start], set(), set(), set()
        seen.add(start)
        while stack:
            u = stack.pop()
            nodes.add(u)
            for lid, v in adj[u]:
                if lid not in active:
                    continue
                lids.add(lid)
                if v in sd:
                    terms.add(v)
                elif v not in seen:
                    seen.add(v)
                    stack.append(v)
        pieces.append((frozenset(nodes), frozenset(lids), frozenset(terms)))
    return pieces


def tree_reduce(net: Network, active=None, p=None, root=None) -> ReducedTree:
    """Detect tree reducibility and orient the reduced tree toward `root`.

    Supply/demand nodes are the junctions; every transmission piece must touch
    at most two of them.  Pieces touching a single junction can never carry
    flow and are set aside.  Raises NotTreeReducible when a piece touches three
    or more junctions or the reduced multigraph contains a cycle.
    """
    active = frozenset(active) if active is not None else net.all_links()
    sd = [n for n in net.nodes if net.roles[n] != "transmission"]
    if not sd:
        raise NotTreeReducible("no supply/demand nodes")
    zero_flow = set()
    groups: dict[frozenset, dict] = {}
    for nodes, lids, terms in _transmission_pieces(net, active, sd):
        if len(terms) <= 1:
            zero_flow |= lids
            continue
        if len(terms) > 2:
            raise NotTreeReducible(
                f"transmission piece touches {len(terms)} junctions"
            )
        key = frozenset(terms)
        g = groups.setdefault(key, {"lids": set(), "interior": set()})
        g["lids"] |= lids
        g["interior"] |= nodes
    # direct junction-to-junction links
    for lid in active:
        l = net.links[net.link_index[lid]]
        if l.tail in sd and l.head in sd:
            key = frozenset((l.tail, l.head))
            g = groups.setdefault(key, {"lids": set(), "interior": set()})
            g["lids"].add(lid)

    # the reduced graph must be a tree on the junctions it touches
    adj: dict[str, list] = {}
    for key in groups:
        a, b = tuple(key)
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    touched = sorted(adj)
    if root is None:
        root = touched[0] if touched else sd[0]
    root = str(root)
    if touched and root not in adj:
        raise NotTreeReducible(f"root {root} is isolated")
    parent_node: dict[str, str] = {}
    seen = {root}
    stack = [root]
    order_nodes = [root]
    while stack:
        u = stack.pop(0)
        for v in adj.get(u, []):
            if v in seen:
                continue
            seen.add(v)
            parent_node[v] = u
            order_nodes.append(v)
            stack.append(v)
    if len(seen) != len(touched or [root]):
        raise NotTreeReducible("reduced graph is disconnected")
    nedges = len(groups)
    if nedges != len(seen) - 1:
        raise NotTreeReducible("reduced graph contains a cycle")

    labels = order_nodes  # BFS order: parents precede children
    label_of = {n: i for i, n in enumerate(labels)}
    parent = {label_of[v]: label_of[u] for v, u in parent_node.items()}
    children: dict[int, list] = {i: [] for i in range(len(labels))}
    for c, par in parent.items():
        children[par].append(c)
    components = {}
    for key, g in groups.items():
        a, b = tuple(key)
        child, par = (a, b) if label_of[a] > label_of[b] else (b, a)
        components[label_of[child]] = ReducibleComponent(
            terminals=(child, par),
            lids=frozenset(g["lids"]),
            interior=frozenset(g["interior"]),
        )
    return ReducedTree(
        net=net,
        labels=labels,
        parent=parent,
        children=children,
        components=components,
        zero_flow_links=frozenset(zero_flow),
    )


# -- feasible throughput sets of a component -----------------------------------


def min_cut_capacity(net: Network, lids, source, sink) -> float:
    """Max-flow value between the terminals using capacities (Edmonds-Karp)."""
    lids = list(lids)
    cap: dict[tuple, float] = {}
    adj: dict[str, set] = {}
    for lid in lids:
        l = net.links[net.link_index[lid]]
        c = net.capacities[lid]
        cap[(l.tail, l.head)] = cap.get((l.tail, l.head), 0.0) + c
        cap[(l.head, l.tail)] = cap.get((l.head, l.tail), 0.0) + c
        adj.setdefault(l.tail, set()).add(l.head)
        adj.setdefault(l.head, set()).add(l.tail)
    flow = 0.0
    while True:
        # BFS for an augmenting path
        prev = {source: None}
        queue = [source]
        while queue and sink not in prev:
            u = queue.pop(0)
            for v in adj.get(u, ()):  # noqa: B905
                if v not in prev and cap.get((u, v), 0.0) > 1e-12:
                    prev[v] = u
                    queue.append(v)
        if sink not in prev:
            return flow
        path = []
        v = sink
        while prev[v] is not None:
            path.append((prev[v], v))
            v = prev[v]
        push = min(cap[(u, v)] for u, v in path)
        for u, v in path:
            cap[(u, v)] -= push
            cap[(v, u)] = cap.get((v, u), 0.0) + push
        flow += push


def _component_net(net: Network, comp: ReducibleComponent):
    """Sub-network of the component with its terminals as supply/demand."""
    child, par = comp.terminals
    nodes = sorted(set([child, par]) | set(comp.interior), key=net.node_index.get)
    links = [
        (l.lid, l.tail, l.head) for l in net.links if l.lid in comp.lids
    ]
    roles = {n: "transmission" for n in nodes}
    roles[child] = "supply"
    roles[par] = "demand"
    sub = Network(
        nodes=nodes,
        links=links,
        weights={lid: net.weights[lid] for lid in comp.lids},
        capacities={lid: net.capacities[lid] for lid in comp.lids},
        roles=roles,
    )
    return sub, child, par


def _throughput_rows(sub: Network, active, src, dst):
    """Per-unit flows on `active` when one unit enters at src and leaves at dst,
    or None when the terminals are disconnected."""
    comps = connected_components(sub, active)
    same = any(src in c and dst in c for c in comps)
    if not same:
        return None, []
    p = np.zeros(len(sub.nodes))
    p[sub.node_index[src]] = 1.0
    p[sub.node_index[dst]] = -1.0
    rows, order = flow_matrix(sub, active)
    return rows @ p, order


def component_feasible_set(
    net: Network, comp: ReducibleComponent, N: int, mode="constant"
) -> list:
    """Closure of the feasible terminal-throughput values of a two-terminal
    component, as a sorted union of closed intervals (symmetric about 0).

    constant: the same z flows at every stage; the cascade it triggers must
    stop within N-1 steps with all surviving flows within capacity (a
    disconnection forces z = 0).  general-1D: the throughput may change every
    stage (monotonicity relaxed); the returned set holds the achievable
    terminal values, searched from the min-cut interval.
    """
    sub, src, dst = _component_net(net, comp)
    if N < 1:
        raise ValueError("N >= 1 required")
    cmax = min_cut_capacity(sub, comp.lids, src, dst)

    def split_points(flows, order):
        pts = set()
        for f, lid in zip(flows, order):
            if abs(f) > 1e-12:
                pts.add(sub.capacities[lid] / abs(f))
        return sorted(pts)

    def survivors(active, flows, order, z):
        return frozenset(
            lid
            for lid, f in zip(order, flows)
            if abs(z * f) <= sub.capacities[lid] + EPS_CAP
        )

    feasible: list = []

    def feasible_now(active, z_hi):
        """Largest z on [0, z_hi] feasible for this topology (None if z>0 dies)."""
        flows, order = _throughput_rows(sub, active, src, dst)
        if flows is None:
            return None
        zmax = min(
            (sub.capacities[lid] / abs(f) for lid, f in zip(order, flows) if abs(f) > 1e-12),
            default=np.inf,
        )
        return min(zmax, z_hi)

    def rec_constant(active, lo, hi, stage):
        if hi - lo <= 1e-12:
            return
        flows, order = _throughput_rows(sub, active, src, dst)
        if flows is None:
            return  # z != 0 cannot be balanced any more
        pts = [p for p in split_points(flows, order) if lo + 1e-12 < p < hi - 1e-12]
        edges = [lo] + pts + [hi]
        for a, b in zip(edges, edges[1:]):
            zmid = 0.5 * (a + b)
            nxt = survivors(active, flows, order, zmid)
            if nxt == active:
                feasible.append((a, b))  # closure of the stable slab
            elif stage + 1 <= N - 1:
                rec_constant(nxt, a, b, stage + 1)

    if mode == "constant":
        rec_constant(frozenset(comp.lids), 0.0, cmax + 1e-9, 0)
        out = merge_intervals(feasible + [(0.0, 0.0)])
        out = intersect_unions(out, [(0.0, cmax)])
    elif mode == "general-1D":
        reach: list = []

        def rec_general(active, lo, hi, stage):
            if hi - lo <= 1e-12:
                return
            flows, order = _throughput_rows(sub, active, src, dst)
            if flows is None:
                return
            zcap = feasible_now(active, hi)
            if zcap is not None and zcap > lo:
                reach.append((lo, zcap))
            if stage + 1 > N - 1:
                return
            pts = [p for p in split_points(flows, order) if lo + 1e-12 < p < hi - 1e-12]
            edges = [lo] + pts + [hi]
            for a, b in zip(edges, edges[1:]):
                nxt = survivors(active, flows, order, 0.5 * (a + b))
                if nxt != active:
                    # a throughput in (a, b) wrecks those links; afterwards any
                    # magnitude up to the remaining interval may be chosen
                    rec_general(nxt, 0.0, hi, stage + 1)

        rec_general(frozenset(comp.lids), 0.0, cmax + 1e-9, 0)
        out = merge_intervals(reach + [(0.0, 0.0)])
        out = intersect_unions(out, [(0.0, cmax)])
    else:
        raise ValueError(f"unknown mode {mode!r}")
    # symmetric capacities: the set is symmetric about zero
    return merge_intervals(out + [(-b, -a) for a, b in out])


# -- two-iteration constant-control solver ------------------------------------


@dataclass
class TreeNodeReport:
    """Per-node local value function from the leaf-to-root pass."""

    label: int
    node: str
    summit: tuple  # apex of the combined tent before domain restriction
    domain: list  # interval union: admissible throughput toward the parent
    fn: PiecewiseTent


@dataclass
class TreeSolution:
    value: float
    control: dict  # node id -> constant injection
    reports: dict  # tree label -> TreeNodeReport
    throughput: dict  # tree label -> z toward the parent


def solve_tree_constant(
    net: Network, state: NetworkState, N: int, root=None, tree: ReducedTree = None
) -> TreeSolution:
    """Optimal constant control of a tree-reducible network.

    Leaf-to-root, every junction combines its own shedding tent with the
    children's value functions by sup-convolution and clips the domain of the
    throughput toward its parent to the component's feasible set intersected
    with what the subtree can emit.  Root-to-leaves, the root throughput is
    zero and every sup-convolution is split by the proportional water-filling
    rule.  The residual-load value is the root function at zero.
    """
    if tree is None:
        tree = tree_reduce(net, active=state.active, root=root)
    p = state.p_array()
    p0 = {lab: float(p[net.node_index[tree.node_of(lab)]]) for lab in tree.order}

    fns: dict[int, PiecewiseTent] = {}
    doms: dict[int, list] = {}
    inputs_of: dict[int, list] = {}
    reports: dict[int, TreeNodeReport] = {}
    for lab in reversed(list(tree.order)):  # children before parents
        own = tents.tent_of_load(p0[lab])
        ins = [own] + [fns[ch] for ch in sorted(tree.children[lab])]
        inputs_of[lab] = ins
        combined = tents.sup_convolve(ins)
        if lab == 0:
            fns[lab] = combined
            doms[lab] = combined.domain()
        else:
            comp = tree.components[lab]
            dset = component_feasible_set(net, comp, N, mode="constant")
            doms[lab] = intersect_unions(combined.domain(), dset)
            if not doms[lab]:
                doms[lab] = [(0.0, 0.0)]
            fns[lab] = combined.restrict(doms[lab])
        piece = fns[lab].piece_at(fns[lab].max_point()[0])
        reports[lab] = TreeNodeReport(
            label=lab,
            node=tree.node_of(lab),
            summit=tuple(piece.summit),
            domain=doms[lab],
            fn=fns[lab],
        )

    if not fns[0].contains(0.0):
        raise NotTreeReducible("zero throughput infeasible at the root")
    value = fns[0](0.0)

    z: dict[int, float] = {0: 0.0}
    control: dict[str, float] = {n: 0.0 for n in net.nodes}
    for lab in tree.order:
        ins = inputs_of[lab]
        kids = sorted(tree.children[lab])
        x = tents.split_target(ins, z[lab])
        control[tree.node_of(lab)] = float(x[0])
        for ch, xv in zip(kids, x[1:]):
            z[ch] = float(xv)
    return TreeSolution(value=value, control=control, reports=reports, throughput=z)


def solve_one_shot(net: Network, state: NetworkState, N: int, root=None):
    """Best one-shot control: run the cascade uncontrolled for t stages, then
    shed once to the best constant control of the residual network over the
    remaining N - t stages; earliest maximizing stage wins.

    Returns (value, shed_stage, TreeSolution of the winning stage, per-stage
    values).  Falls back to the exact constant-restricted search when a
    residual network is not tree reducible.
    """
    from .aggregation import constant_restricted_value

    if N < 1:
        raise ValueError("N >= 1 required")
    p = state.p_array()
    prefix = [state]
    for st in run_uncontrolled(net, state)[1:]:
        # usable prefix: p0 must stay balanced on the reached topology
        from .network import is_balanced

        if not is_balanced(net, st.active, p):
            break
        prefix.append(NetworkState.make(net, st.active, p))
    best = None
    per_stage = []
    for t, st in enumerate(prefix[: N]):
        horizon = N - t
        try:
            sol = solve_tree_constant(net, st, horizon, root=root)
            val, ctl = sol.value, sol.control
        except NotTreeReducible:
            val, u = constant_restricted_value(net, st, horizon)
            ctl = {n: float(u[net.node_index[n]]) for n in net.nodes}
            sol = None
        per_stage.append((t, val))
        if best is None or val > best[0] + 1e-12:
            best = (val, t, ctl, sol)
    value, t_star, ctl, sol = best
    return value, t_star, ctl, per_stage
