import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from loadshed.tents import (
    EmptyDomain,
    InfeasibleTarget,
    PiecewiseTent,
    TentPiece,
    merge_intervals,
    minkowski_sum,
    shortcut_applies,
    split_target,
    sum_connected_by_gaps,
    sup_convolve,
    tent_of_load,
    union_is_connected,
)


def brute_pair(a, b, z, n=4001):
    best = -np.inf
    for lo, hi in a.domain():
        xs = np.linspace(lo, hi, n)
        for x in xs:
            y = z - x
            if b.contains(y):
                best = max(best, a(x) + b(y))
    return best


def random_piecewise(rng, max_pieces=3):
    k = int(rng.integers(1, max_pieces + 1))
    pieces = []
    x = float(rng.uniform(-3, 0))
    for _ in range(k):
        w = float(rng.uniform(0.4, 2.0))
        a = float(rng.uniform(x, x + w))
        h = float(rng.uniform(-1, 2))
        pieces.append(TentPiece.make(x, x + w, (a, h)))
        x += w + float(rng.uniform(0.3, 1.0))
    return PiecewiseTent.make(pieces)


def random_restricted_tent(rng):
    """A single tent restricted to 1-3 intervals containing its apex."""
    a = float(rng.uniform(-1, 1))
    h = float(rng.uniform(0, 2))
    lo = a - float(rng.uniform(0.5, 2.0))
    hi = a + float(rng.uniform(0.5, 2.0))
    cuts = sorted(float(rng.uniform(lo, hi)) for _ in range(2 * int(rng.integers(0, 2))))
    ivs = []
    edges = [lo] + cuts + [hi]
    for i in range(0, len(edges), 2):
        ivs.append((edges[i], edges[i + 1]))
    if not any(l <= a <= r for l, r in ivs):
        ivs.append((a - 0.05, a + 0.05))
        ivs = merge_intervals(ivs)
    return PiecewiseTent.make([TentPiece.make(l, r, (a, h)) for l, r in ivs])


# -- interval helpers -----------------------------------------------------------


def test_merge_and_minkowski():
    assert merge_intervals([(0, 1), (0.5, 2), (3, 4)]) == [(0, 2), (3, 4)]
    assert minkowski_sum([(0, 1), (3, 4)], [(0, 1)]) == [(0, 2), (3, 5)]
    assert union_is_connected([(0, 1), (1, 2)])
    assert not union_is_connected([(0, 1), (2, 3)])


def test_gap_bound_implies_connected_self_sums(rng):
    for _ in range(60):
        k = int(rng.integers(2, 4))
        ivs, x = [], 0.0
        for _ in range(k):
            w = float(rng.uniform(0.2, 1.5))
            ivs.append((x, x + w))
            x += w + float(rng.uniform(0.1, 1.2))
        n = int(rng.integers(1, 6))
        if sum_connected_by_gaps(ivs, n):
            acc = ivs
            for _ in range(n - 1):
                acc = minkowski_sum(acc, ivs)
            assert union_is_connected(acc)


# -- single tents ----------------------------------------------------------------


def test_tent_evaluation_and_translation():
    t = TentPiece.make(0, 2, (1, 2))
    assert t.value(0) == 1 and t.value(1) == 2 and t.value(2) == 1
    # apex translated to the nearer endpoint keeps values
    left = TentPiece.make(-3, 0, (1, 2))
    assert left.apex == (0, 1)
    for x in np.linspace(-3, 0, 7):
        assert left.value(x) == pytest.approx(x - 1 + 2)
    right = TentPiece.make(2, 4, (1, 2))
    assert right.apex == (2, 1)
    for x in np.linspace(2, 4, 7):
        assert right.value(x) == pytest.approx(-x + 1 + 2)


def test_tent_of_load():
    for p0 in (3.0, -2.5):
        t = tent_of_load(p0)
        assert t.domain() == [(min(0.0, p0), max(0.0, p0))]
        assert t.max_point() == (p0, abs(p0))
        assert t(0.0) == pytest.approx(0.0)


def test_linear_pieces_are_tents():
    up = PiecewiseTent.linear(0, 2, +1, 5.0)
    for x in np.linspace(0, 2, 5):
        assert up(x) == pytest.approx(5 + x)
    down = PiecewiseTent.linear(0, 2, -1, 5.0)
    for x in np.linspace(0, 2, 5):
        assert down(x) == pytest.approx(5 - x)


# -- sup-convolution -------------------------------------------------------------


def test_single_interval_combination():
    g1 = PiecewiseTent.single(0, 2, (1, 2))
    g2 = PiecewiseTent.single(2, 4, (3, 4))
    out = sup_convolve([g1, g2])
    assert out.domain() == [(2, 6)]
    assert out.max_point() == (4, 6)
    for z in np.linspace(2, 6, 17):
        assert out(z) == pytest.approx(brute_pair(g1, g2, z), abs=1e-9)


def test_identity_on_single_input():
    g = PiecewiseTent.single(0, 1, (0.5, 1))
    assert sup_convolve([g]) is g


def test_envelope_matches_brute_force(rng):
    worst = 0.0
    for _ in range(40):
        a, b = random_piecewise(rng), random_piecewise(rng)
        out = sup_convolve([a, b])
        for lo, hi in out.domain():
            for z in np.linspace(lo + 1e-6, hi - 1e-6, 7):
                worst = max(worst, abs(out(z) - brute_pair(a, b, z)))
    assert worst <= 1e-6


def test_three_input_brute_force(rng):
    for _ in range(6):
        gs = [random_piecewise(rng, max_pieces=2) for _ in range(3)]
        out = sup_convolve(gs)
        rngz = out.domain()
        for z in np.linspace(rngz[0][0] + 1e-6, rngz[-1][1] - 1e-6, 5):
            if not out.contains(z):
                continue
            # brute force over a grid of (x1, x2)
            best = -np.inf
            for lo1, hi1 in gs[0].domain():
                for x1 in np.linspace(lo1, hi1, 201):
                    for lo2, hi2 in gs[1].domain():
                        for x2 in np.linspace(lo2, hi2, 201):
                            x3 = z - x1 - x2
                            if gs[2].contains(x3):
                                best = max(best, gs[0](x1) + gs[1](x2) + gs[2](x3))
            if best > -np.inf:
                assert out(z) >= best - 1e-6
                assert out(z) <= best + 0.05  # grid resolution slack


def test_example_pair_of_representations():
    g1 = PiecewiseTent.make([
        TentPiece.make(-4, -2, (-3, 4)),
        TentPiece.make(-1.5, 0, (-1, 2)),
        TentPiece.make(0, 1.5, (1, 2)),
        TentPiece.make(2, 4, (3, 4)),
    ])
    g2 = PiecewiseTent.make([
        TentPiece.make(-4, 0, (-3, 4)),
        TentPiece.make(0, 4, (3, 4)),
    ])
    o1 = sup_convolve([g1, g1])
    o2 = sup_convolve([g2, g2])
    zs = np.linspace(-8, 8, 1000)
    assert max(abs(o1(z) - o2(z)) for z in zs) <= 1e-9
    # the coarse representation needs 4 subproblems, the fine one 16
    assert len(g2.pieces) ** 2 == 4 and len(g1.pieces) ** 2 == 16


def test_shortcut_soundness(rng):
    """Whenever the convexified route fires it agrees with full enumeration."""
    fired = 0
    for _ in range(80):
        gs = [random_restricted_tent(rng) for _ in range(int(rng.integers(2, 4)))]
        if shortcut_applies(gs):
            fired += 1
            fast = sup_convolve(gs)
            slow = sup_convolve(gs, force_enumeration=True)
            lo, hi = fast.domain()[0]
            for z in np.linspace(lo, hi, 60):
                assert fast(z) == pytest.approx(slow(z), abs=1e-7)
    assert fired > 0


def test_shortcut_needs_apex_in_domain():
    g = PiecewiseTent.make([
        TentPiece.make(-2, -1, (0, 1)),
        TentPiece.make(1, 2, (0, 1)),
    ])  # apex abscissa 0 lies in the gap
    assert not shortcut_applies([g, g])


def test_output_is_valid_piecewise_tent(rng):
    """Closure property: slopes +-1 with in-domain apexes after translation."""
    for _ in range(30):
        gs = [random_piecewise(rng) for _ in range(2)]
        out = sup_convolve(gs)
        for p in out.pieces:
            assert p.lo - 1e-12 <= p.apex[0] <= p.hi + 1e-12
            for x0, x1 in [(p.lo, p.apex[0]), (p.apex[0], p.hi)]:
                if x1 - x0 > 1e-9:
                    slope = (p.value(x1) - p.value(x0)) / (x1 - x0)
                    assert abs(abs(slope) - 1) < 1e-9


# -- argmax splitting ------------------------------------------------------------


def test_split_at_apex_returns_apex():
    g1 = PiecewiseTent.single(0, 2, (1, 2))
    g2 = PiecewiseTent.single(-1, 3, (0.5, 1))
    x = split_target([g1, g2], 1.5)
    assert np.allclose(x, [1.0, 0.5])


def test_split_single_input():
    g = PiecewiseTent.single(0, 2, (1, 2))
    assert split_target([g], 0.7) == pytest.approx(0.7)


def test_split_matches_grid(rng):
    for _ in range(30):
        gs = [random_piecewise(rng, 2) for _ in range(2)]
        out = sup_convolve(gs)
        dom = out.domain()
        z = float(rng.uniform(dom[0][0], dom[-1][1]))
        if not out.contains(z):
            continue
        x = split_target(gs, z)
        assert abs(sum(x) - z) < 1e-9
        assert gs[0].contains(x[0]) and gs[1].contains(x[1])
        val = gs[0](x[0]) + gs[1](x[1])
        assert val == pytest.approx(out(z), abs=1e-9)


def test_split_outside_domain_raises():
    g = PiecewiseTent.single(0, 1, (0.5, 1))
    with pytest.raises(InfeasibleTarget):
        split_target([g, g], 5.0)


def test_split_stays_in_apex_box():
    """Water-filling sheds positive coordinates toward zero first."""
    g1 = PiecewiseTent.single(-1, 3, (2, 2))   # apex at +2
    g2 = PiecewiseTent.single(-2, 1, (-1, 1))  # apex at -1
    x = split_target([g1, g2], 0.0)
    # between apex sum (1) and zero target: positive coordinate shrinks first
    assert -1 - 1e-9 <= x[1] <= 0 + 1e-9 or abs(x[1] + 1) < 1e-9
    assert 0 - 1e-9 <= x[0] <= 2 + 1e-9
    assert abs(sum(x)) < 1e-9
