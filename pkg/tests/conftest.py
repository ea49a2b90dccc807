import numpy as np
import pytest

from loadshed.cascade import NetworkState
from loadshed.network import Network


def make_net(links, injections, weights=None, capacities=None):
    """Network from (lid, tail, head, w, c) tuples and a node->p mapping."""
    nodes = []
    for _, a, b, *_ in links:
        for n in (a, b):
            if n not in nodes:
                nodes.append(n)
    roles = {}
    for n in nodes:
        v = injections.get(n, 0.0)
        roles[n] = "supply" if v > 0 else ("demand" if v < 0 else "transmission")
    net = Network(
        nodes,
        [(l[0], l[1], l[2]) for l in links],
        {l[0]: l[3] for l in links},
        {l[0]: l[4] for l in links},
        roles,
    )
    state = NetworkState.make(net, net.all_links(), net.p_vector(injections))
    return net, state


def triangle_net():
    return make_net(
        [("e1", "1", "2", 2, 6), ("e2", "1", "2", 1, 7),
         ("e3", "1", "3", 1, 14), ("e4", "2", "3", 1, 5)],
        {"1": 30, "2": -10, "3": -20},
    )


def diamond_net(scenario):
    caps = {1: [0.8, 1.5, 0.6, 0.5, 0.25], 2: [0.8, 1.5, 0.7, 0.5, 0.25]}[scenario]
    return make_net(
        [("e1", "1", "2", 1, caps[0]), ("e2", "1", "3", 1, caps[1]),
         ("e3", "2", "3", 1, caps[2]), ("e4", "1", "2", 1, caps[3]),
         ("e5", "2", "3", 1, caps[4])],
        {"1": 3, "3": -3},
    )


def random_sd_pair_net(rng, max_extra=3):
    """Random connected net with one supply and one demand (<= 5 nodes)."""
    n_mid = int(rng.integers(0, 4))
    nodes = ["s", "d"] + [f"m{i}" for i in range(n_mid)]
    links = []
    k = 0

    def add(a, b):
        nonlocal k
        k += 1
        links.append((f"e{k}", a, b, float(rng.uniform(0.5, 3.0)), float(rng.uniform(0.3, 2.0))))

    # random spanning tree, then extra links
    for i in range(1, len(nodes)):
        add(nodes[int(rng.integers(0, i))], nodes[i])
    for _ in range(int(rng.integers(0, max_extra + 1))):
        i, j = rng.integers(0, len(nodes), 2)
        if i != j:
            add(nodes[int(i)], nodes[int(j)])
    p = float(rng.uniform(0.5, 2.0))
    return make_net(links, {"s": p, "d": -p})


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_tree_reducible(rng, max_junctions=4):
    """Random tree of junctions whose links are single links, parallel pairs,
    or two-hop transmission paths."""
    nj = int(rng.integers(2, max_junctions + 1))
    names = [f"j{i}" for i in range(nj)]
    links = []
    k = 0
    mid = 0

    def add(a, b, w, c):
        nonlocal k
        k += 1
        links.append((f"e{k}", a, b, float(w), float(c)))

    for i in range(1, nj):
        parent = names[int(rng.integers(0, i))]
        kind = rng.integers(0, 3)
        if kind == 0:
            add(parent, names[i], rng.uniform(0.5, 2), rng.uniform(0.4, 1.6))
        elif kind == 1:
            add(parent, names[i], rng.uniform(0.5, 2), rng.uniform(0.3, 1.2))
            add(parent, names[i], rng.uniform(0.5, 2), rng.uniform(0.3, 1.2))
        else:
            m = f"t{mid}"
            mid += 1
            add(parent, m, rng.uniform(0.5, 2), rng.uniform(0.4, 1.6))
            add(m, names[i], rng.uniform(0.5, 2), rng.uniform(0.4, 1.6))
    vals = rng.uniform(0.4, 1.5, nj)
    vals[0] = -vals[1:].sum()
    inj = {names[i]: float(vals[i]) for i in range(nj)}
    return make_net(links, inj)
