import numpy as np
import pytest

from loadshed import instances
from loadshed.aggregation import (
    RetrievalFailed,
    baseline_discretized_search,
    constant_restricted_value,
    j1,
    node_upper_bound,
    partition_controls,
    retrieve_control,
    root_node,
    value_iteration,
)
from loadshed.cascade import NetworkState, failure_step, is_feasible_sequence
from loadshed.geometry import facet_hyperplanes
from loadshed.network import compute_flow

from conftest import diamond_net, random_sd_pair_net, triangle_net


def in_region(region, x, tol=1e-7):
    return all(
        np.dot(h.normal, x) - h.offset <= tol for _, h in facet_hyperplanes(region)
    )


def test_triangle_partition_betas():
    net, state = triangle_net()
    amb, root = root_node(net, state)
    cells = partition_controls(net, root, amb)
    by_next = {ctl.next_active: ctl for ctl in cells}
    assert len(cells) == 4
    assert frozenset({"e2", "e3"}) in by_next
    assert frozenset({"e2", "e3", "e4"}) in by_next
    # alpha_1 strictly inside the {e2,e3} cell; the limit point on the
    # boundary of the cell keeping e4
    a1 = np.array([23.0, -8.0, -15.0])
    ainf = np.array([21.0, -7.0, -14.0])
    assert in_region(by_next[frozenset({"e2", "e3"})].region, a1, tol=-1e-9 * 0 + 1e-9)
    assert in_region(by_next[frozenset({"e2", "e3", "e4"})].region, ainf)
    assert by_next[frozenset({"e2", "e3"})].beta == (1, 0, 0, 1)
    assert by_next[frozenset({"e2", "e3", "e4"})].beta == (1, 0, 0, 0)


def test_partition_cells_are_consistent(rng):
    """Sampled interior points of every cell reproduce the cell's survivors."""
    net, state = triangle_net()
    amb, root = root_node(net, state)
    for ctl in partition_controls(net, root, amb):
        V = ctl.region.vertex_coords()
        if ctl.region.top_dim() == 0:
            continue
        for _ in range(50):
            w = rng.dirichlet(np.ones(len(V)) * 3.0)
            u = w @ V
            nxt = failure_step(net, state, amb.full(u))
            # boundary samples may fall into the closure of a neighbour
            margin = min(
                abs(np.dot(h.normal, u) - h.offset)
                for _, h in facet_hyperplanes(ctl.region)
            )
            if margin > 1e-7:
                assert nxt.active == ctl.next_active


def test_cover_exactness(rng):
    """Every admissible control lies in some cell closure."""
    net, state = triangle_net()
    amb, root = root_node(net, state)
    cells = partition_controls(net, root, amb)
    p0 = amb.p0
    for _ in range(200):
        u = rng.uniform(0, 1, amb.dim) * p0
        u = u - (u.sum() / amb.dim)  # project to balance
        if np.any(np.sign(p0) * u < -1e-12) or np.any(np.abs(u) > np.abs(p0)):
            continue
        assert any(in_region(c.region, u) for c in cells)


def test_j1_trivial_and_diamond():
    net, state = diamond_net(1)
    amb, root = root_node(net, state)
    val, u, _ = j1(net, root, amb)
    assert val == pytest.approx(2.0, abs=1e-9)  # max z with all links ok is 1
    zero = NetworkState.make(net, net.all_links(), np.zeros(3))
    amb0, root0 = root_node(net, zero)
    val0, _, _ = j1(net, root0, amb0)
    assert val0 == pytest.approx(0.0, abs=1e-12)


def test_value_iteration_feasible_root_returns_injection():
    net, _ = triangle_net()
    p = np.array([21.0, -7.0, -14.0])
    st = NetworkState.make(net, {"e2", "e3"}, p)
    for N in (1, 2, 3):
        res = value_iteration(net, st, N)
        assert res.value == pytest.approx(42.0, abs=1e-9)


def test_value_iteration_diamond_optimal():
    for scenario, expect in ((1, 3.6), (2, 4.2)):
        net, state = diamond_net(scenario)
        res = value_iteration(net, state, 2)
        assert res.value == pytest.approx(expect, abs=1e-9)


def test_value_iteration_triangle_supremum():
    net, state = triangle_net()
    res = value_iteration(net, state, 3)
    assert res.value == pytest.approx(42.0, abs=1e-9)
    assert res.per_depth[1] < res.per_depth[2] <= res.per_depth[3]


def test_pruning_soundness(rng):
    for _ in range(12):
        net, state = random_sd_pair_net(rng)
        a = value_iteration(net, state, 2, prune=True)
        b = value_iteration(net, state, 2, prune=False)
        assert a.value == pytest.approx(b.value, abs=1e-9)


def test_upper_bound_brackets_value(rng):
    net, state = triangle_net()
    amb, root = root_node(net, state)
    res = value_iteration(net, state, 2)
    v1, _, _ = j1(net, root, amb)
    assert v1 - 1e-9 <= res.value <= node_upper_bound(root, amb) + 1e-9


def test_retrieval_triangle_reproduces_path():
    net, state = triangle_net()
    res = value_iteration(net, state, 3)
    controls = retrieve_control(net, res, 1e-4, state=state)
    assert len(controls) == 3
    assert is_feasible_sequence(net, state, controls)
    assert float(net.s @ controls[-1]) >= res.value - 1e-4
    # first stage removes e1 and e4 as in the optimal aggregated path
    nxt = failure_step(net, state, controls[0])
    assert nxt.active == frozenset({"e2", "e3"})
    # monotone shedding along the sequence
    for a, b in zip(controls, controls[1:]):
        assert np.all(np.sign(a) * b <= np.sign(a) * a + 1e-9)


def test_retrieval_feasible_root_keeps_injection():
    net, _ = triangle_net()
    p = np.array([21.0, -7.0, -14.0])
    st = NetworkState.make(net, {"e2", "e3"}, p)
    res = value_iteration(net, st, 2)
    controls = retrieve_control(net, res, 1e-6, state=st)
    assert float(net.s @ controls[-1]) >= 42.0 - 1e-6


def test_retrieval_requires_positive_epsilon():
    net, state = triangle_net()
    res = value_iteration(net, state, 2)
    with pytest.raises(ValueError):
        retrieve_control(net, res, 0.0, state=state)


def test_baseline_bounds_exact(rng):
    for scenario in (1, 2):
        net, state = diamond_net(scenario)
        exact = value_iteration(net, state, 2).value
        prev = -np.inf
        for n0 in (20, 60, 200):
            b = baseline_discretized_search(net, state, 2, n0)
            assert b <= exact + 1e-9
            assert b >= prev - 1e-9  # finer grids only help
            prev = b
        assert exact - prev <= 2 * 6.0 / 200


def test_baseline_on_feasible_state_is_exact():
    net, _ = triangle_net()
    p = np.array([21.0, -7.0, -14.0])
    st = NetworkState.make(net, {"e2", "e3"}, p)
    assert baseline_discretized_search(net, st, 2, 11) == pytest.approx(42.0)


def test_constant_restricted_values():
    for scenario, expect in ((1, 3.0), (2, 4.2)):
        net, state = diamond_net(scenario)
        val, u = constant_restricted_value(net, state, 2)
        assert val == pytest.approx(expect, abs=1e-9)
        # the constant control must be feasible end to end
        assert is_feasible_sequence(net, state, [u, u])


def test_memoized_search_matches_across_runs(rng):
    net, state = random_sd_pair_net(rng)
    a = value_iteration(net, state, 3)
    b = value_iteration(net, state, 3)
    assert a.value == b.value and a.per_depth == b.per_depth


def test_verbose_stats_csv():
    import io as _io

    net, state = triangle_net()
    buf = _io.StringIO()
    value_iteration(net, state, 3, stats_writer=buf)
    lines = buf.getvalue().strip().splitlines()
    assert len(lines) == 3
    for depth, line in enumerate(lines, start=1):
        cols = line.split(",")
        assert int(cols[0]) == depth and len(cols) == 4
        int(cols[1]); int(cols[2]); float(cols[3])


def test_retrieval_ieee39_three_stages():
    net, state = instances.get("ieee39")
    res = value_iteration(net, state, 3)
    controls = retrieve_control(net, res, 1e-3, state=state)
    assert is_feasible_sequence(net, state, controls)
    assert float(net.s @ controls[-1]) >= 11.150 - 1e-3


def test_baseline_matches_parallel_closed_form(rng):
    from loadshed.tree_solver import ParallelProfile, parallel_optimal
    from conftest import make_net

    for _ in range(5):
        n = int(rng.integers(2, 5))
        w, c = rng.uniform(0.3, 3.0, n), rng.uniform(0.3, 2.0, n)
        p0 = float(rng.uniform(0.5, 1.3) * c.sum())
        net, state = make_net(
            [(f"e{i+1}", "1", "2", w[i], c[i]) for i in range(n)],
            {"1": p0, "2": -p0},
        )
        N = int(rng.integers(1, 4))
        prof = ParallelProfile.of(w, c)
        analytic = 2 * parallel_optimal(prof, p0, N)[-1]
        grid = baseline_discretized_search(net, state, N, 200)
        assert grid <= analytic + 1e-9  # one-shot record level is optimal
        assert grid >= analytic - 2 * (2 * p0) / 200


def random_multi_sd_net(rng):
    """Two supplies and two demands (plus an optional hub), balanced: control
    cells reach three dimensions and components can split while live."""
    from conftest import make_net

    n_mid = int(rng.integers(0, 2))
    nodes = ["s1", "s2", "d1", "d2"] + [f"m{i}" for i in range(n_mid)]
    links = []
    k = 0

    def add(a, b):
        nonlocal k
        k += 1
        links.append(
            (f"e{k}", a, b, float(rng.uniform(0.5, 3.0)), float(rng.uniform(0.3, 1.8)))
        )

    for i in range(1, len(nodes)):
        add(nodes[int(rng.integers(0, i))], nodes[i])
    for _ in range(int(rng.integers(1, 3))):
        i, j = rng.integers(0, len(nodes), 2)
        if i != j:
            add(nodes[int(i)], nodes[int(j)])
    s1, s2 = rng.uniform(0.4, 1.4, 2)
    d1 = float(rng.uniform(0.2, s1 + s2 - 0.2))
    return make_net(
        links, {"s1": float(s1), "s2": float(s2), "d1": -d1, "d2": -(s1 + s2 - d1)}
    )


def test_multi_supply_instances_full_stack(rng):
    """Higher-dimensional cells: pruning equivalence, grid lower bound, and
    certified retrieval on nets with two supplies and two demands."""
    for _ in range(8):
        net, state = random_multi_sd_net(rng)
        N = int(rng.integers(1, 4))
        res = value_iteration(net, state, N)
        assert value_iteration(net, state, N, prune=False).value == pytest.approx(
            res.value, abs=1e-9
        )
        assert baseline_discretized_search(net, state, N, 21) <= res.value + 1e-6
        controls = retrieve_control(net, res, 1e-4, state=state)
        assert is_feasible_sequence(net, state, controls)
        assert float(net.s @ controls[-1]) >= res.value - 1e-4
