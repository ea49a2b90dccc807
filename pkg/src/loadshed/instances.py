"""Bundled benchmark instances.

All numbers are per-unit.  The 39-bus New England system appears twice with
different parameter sets: `ieee39` (single supply at bus 39, loads at buses 4
and 16, susceptances 1/x from the standard branch data) used by the residual
load table, and `ieee39-tree` (round weights, 13 supply/demand buses, initial
outage of links e6/e16/e40) whose residual network is tree reducible.
"""

from __future__ import annotations


from .cascade import NetworkState
from .network import Network

# fbus, tbus, resistance r, reactance x, tap ratio -- standard 39-bus branch
# list, links e1..e46 in order (tap 0 means a plain line)
_IEEE39_BRANCHES = [
    (1, 2, 0.0035, 0.0411, 0), (1, 39, 0.0010, 0.0250, 0),
    (2, 3, 0.0013, 0.0151, 0), (2, 25, 0.0070, 0.0086, 0),
    (2, 30, 0.0000, 0.0181, 1.025), (3, 4, 0.0013, 0.0213, 0),
    (3, 18, 0.0011, 0.0133, 0), (4, 5, 0.0008, 0.0128, 0),
    (4, 14, 0.0008, 0.0129, 0), (5, 6, 0.0002, 0.0026, 0),
    (5, 8, 0.0008, 0.0112, 0), (6, 7, 0.0006, 0.0092, 0),
    (6, 11, 0.0007, 0.0082, 0), (6, 31, 0.0000, 0.0250, 1.070),
    (7, 8, 0.0004, 0.0046, 0), (8, 9, 0.0023, 0.0363, 0),
    (9, 39, 0.0010, 0.0250, 0), (10, 11, 0.0004, 0.0043, 0),
    (10, 13, 0.0004, 0.0043, 0), (10, 32, 0.0000, 0.0200, 1.070),
    (12, 11, 0.0016, 0.0435, 1.006), (12, 13, 0.0016, 0.0435, 1.006),
    (13, 14, 0.0009, 0.0101, 0), (14, 15, 0.0018, 0.0217, 0),
    (15, 16, 0.0009, 0.0094, 0), (16, 17, 0.0007, 0.0089, 0),
    (16, 19, 0.0016, 0.0195, 0), (16, 21, 0.0008, 0.0135, 0),
    (16, 24, 0.0003, 0.0059, 0), (17, 18, 0.0007, 0.0082, 0),
    (17, 27, 0.0013, 0.0173, 0), (19, 20, 0.0007, 0.0138, 1.060),
    (19, 33, 0.0007, 0.0142, 1.070), (20, 34, 0.0009, 0.0180, 1.009),
    (21, 22, 0.0008, 0.0140, 0), (22, 23, 0.0006, 0.0096, 0),
    (22, 35, 0.0000, 0.0143, 1.025), (23, 24, 0.0022, 0.0350, 0),
    (23, 36, 0.0005, 0.0272, 1.000), (25, 26, 0.0032, 0.0323, 0),
    (25, 37, 0.0006, 0.0232, 1.025), (26, 27, 0.0014, 0.0147, 0),
    (26, 28, 0.0043, 0.0474, 0), (26, 29, 0.0057, 0.0625, 0),
    (28, 29, 0.0014, 0.0151, 0), (29, 38, 0.0008, 0.0156, 1.025),
]


def _series_susceptance(r, x, tap):
    """Magnitude of the series branch susceptance, tap-scaled: the DC line
    weight matching the published residual-load values."""
    tap = tap if tap else 1.0
    return x / (r * r + x * x) / tap


def _net(nodes, links, weights, capacities, injections, outages=()):
    roles = {}
    for n in nodes:
        v = injections.get(n, 0.0)
        roles[n] = "supply" if v > 0 else ("demand" if v < 0 else "transmission")
    net = Network(nodes, links, weights, capacities, roles)
    p = net.p_vector(injections)
    active = net.all_links() - frozenset(outages)
    return net, NetworkState.make(net, active, p)


def triangle():
    """Three-node net with a doubled link; the closure counterexample: the
    feasible control set has a boundary point that fails every link."""
    return _net(
        nodes=["1", "2", "3"],
        links=[("e1", "1", "2"), ("e2", "1", "2"), ("e3", "1", "3"), ("e4", "2", "3")],
        weights={"e1": 2, "e2": 1, "e3": 1, "e4": 1},
        capacities={"e1": 6, "e2": 7, "e3": 14, "e4": 5},
        injections={"1": 30, "2": -10, "3": -20},
    )


def diamond(scenario=1):
    """Single supply-demand pair joined through a doubled two-hop path; the two
    capacity scenarios differ only on link e3."""
    caps = {1: [0.8, 1.5, 0.6, 0.5, 0.25], 2: [0.8, 1.5, 0.7, 0.5, 0.25]}[scenario]
    return _net(
        nodes=["1", "2", "3"],
        links=[("e1", "1", "2"), ("e2", "1", "3"), ("e3", "2", "3"),
               ("e4", "1", "2"), ("e5", "2", "3")],
        weights={f"e{i}": 1 for i in range(1, 6)},
        capacities={f"e{i}": c for i, c in zip(range(1, 6), caps)},
        injections={"1": 3, "3": -3},
    )


def two_loads():
    """Four-node net (supply node 4, loads 1 and 2, hub 3): three capacity
    lines in general position cut the admissible square into seven cells.

    The trunk capacity sits strictly between the reachable extremes: at the
    structural value 6 = c2 + c3 the three lines meet in one point (flow
    conservation at the hub) and the middle cell degenerates.
    """
    return _net(
        nodes=["1", "2", "3", "4"],
        links=[("e1", "1", "2"), ("e2", "3", "1"), ("e3", "3", "2"), ("e4", "4", "3")],
        weights={f"e{i}": 1 for i in range(1, 5)},
        capacities={"e1": 10, "e2": 3, "e3": 3, "e4": 5.5},
        injections={"1": -5, "2": -5, "4": 10},
    )


def ieee39():
    """39-bus system, single supply at bus 39 feeding loads at buses 4 and 16;
    susceptances are 1/x of the standard branch data."""
    nodes = [str(i) for i in range(1, 40)]
    links = [(f"e{k+1}", str(a), str(b)) for k, (a, b, *_) in enumerate(_IEEE39_BRANCHES)]
    weights = {
        f"e{k+1}": _series_susceptance(r, x, tap)
        for k, (_, _, r, x, tap) in enumerate(_IEEE39_BRANCHES)
    }
    caps = {}
    special = {
        0.5: [8], 1.0: [9],
        2.5: [13, 21, 22, 23],
        3.0: [3, 28, 29, 35, 36, 38],
        3.5: [16, 17],
        4.0: [7, 26, 30],
        4.5: [1, 2, 4, 24, 25, 31, 39, 40, 42],
    }
    for k in range(len(_IEEE39_BRANCHES)):
        caps[f"e{k+1}"] = 2.0
    for c, idxs in special.items():
        for i in idxs:
            caps[f"e{i}"] = c
    return _net(
        nodes=nodes, links=links, weights=weights, capacities=caps,
        injections={"39": 10.0, "4": -5.0, "16": -5.0},
    )


def ieee39_tree():
    """39-bus system with round weights, 13 supply/demand buses and the
    initial outage {e6, e16, e40}; the residual network is tree reducible.

    Two transcription details: bus 17 carries -1 (the sum of the published
    injections balances only with that sign) and link e26 (16-17) carries
    capacity 5 (the published per-node value functions require its feasible
    throughput set to reach +-5).
    """
    nodes = [str(i) for i in range(1, 40)]
    links = [(f"e{k+1}", str(a), str(b)) for k, (a, b, *_) in enumerate(_IEEE39_BRANCHES)]
    weights = {}
    wspecial = {120.0: [8, 9], 36.0: [11, 12, 15], 46.0: [13, 23],
                24.0: [21, 22], 74.0: [18, 19]}
    for k in range(len(_IEEE39_BRANCHES)):
        weights[f"e{k+1}"] = 80.0
    for w, idxs in wspecial.items():
        for i in idxs:
            weights[f"e{i}"] = w
    caps = {}
    cspecial = {10.0: [14, 24, 25, 43, 45], 9.0: [13, 21, 22, 23],
                7.0: [8, 9], 3.2: [18, 19], 2.5: [11, 12, 15], 5.0: [26]}
    for k in range(len(_IEEE39_BRANCHES)):
        caps[f"e{k+1}"] = 3.0
    for c, idxs in cspecial.items():
        for i in idxs:
            caps[f"e{i}"] = c
    injections = {"31": 10.0, "6": -8.5, "16": -3.5, "19": -3.0, "38": 2.0,
                  "2": -2.0, "17": -1.0, "30": 1.0, "33": 1.0, "34": 1.0,
                  "36": 1.0, "37": 1.0, "39": 1.0}
    return _net(
        nodes=nodes, links=links, weights=weights, capacities=caps,
        injections=injections, outages=["e6", "e16", "e40"],
    )


BUILTIN = {
    "example1": triangle,
    "example2-s1": lambda: diamond(1),
    "example2-s2": lambda: diamond(2),
    "fig4": two_loads,
    "ieee39": ieee39,
    "ieee39-tree": ieee39_tree,
}


def get(name: str):
    """(Network, initial NetworkState) of a bundled instance."""
    try:
        return BUILTIN[name]()
    except KeyError:
        raise KeyError(f"unknown instance {name!r}; choices: {sorted(BUILTIN)}")
