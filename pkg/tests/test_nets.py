"""Direction nets: packing/covering guarantees and chained decompositions."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from randhull.nets import (
    blocked_argmax_dot,
    blocked_max_dot,
    build_net,
    certified_sup_deficit,
    decompose,
    default_streak,
    load_net,
    save_net,
)
from randhull.sampling import philox, unit_directions


def probe_dirs(n, d, seed=777):
    return unit_directions(philox(seed), n, d)


# ---------------------------------------------------------------------------
# blocked reductions


@given(st.integers(1, 40), st.integers(1, 60), st.integers(2, 4))
def test_blocked_max_dot_matches_dense(m, n, d):
    rng = np.random.Generator(np.random.Philox(m * 1000 + n * 10 + d))
    dirs = rng.normal(size=(m, d))
    pts = rng.normal(size=(n, d))
    dense = (dirs @ pts.T).max(axis=1)
    np.testing.assert_allclose(blocked_max_dot(dirs, pts), dense, atol=1e-12)


def test_blocked_argmax_matches_dense():
    rng = np.random.Generator(np.random.Philox(3))
    dirs = rng.normal(size=(17, 3))
    pts = rng.normal(size=(233, 3))
    arg, best = blocked_argmax_dot(dirs, pts)
    dense = dirs @ pts.T
    np.testing.assert_array_equal(arg, dense.argmax(axis=1))
    np.testing.assert_allclose(best, dense.max(axis=1), atol=1e-12)


# ---------------------------------------------------------------------------
# construction invariants


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("delta", [0.3, 0.1])
def test_net_packing_covering_cardinality(d, delta):
    net = build_net(d, delta, seed=42)
    assert net.certified
    assert net.min_pairwise_distance() >= delta * (1.0 - 1e-12)
    assert net.cover_radius <= delta * (1.0 + 1e-12)
    assert len(net.points) <= (3.0 / delta) ** d
    np.testing.assert_allclose(
        np.linalg.norm(net.points, axis=1), 1.0, atol=1e-12
    )
    dist = net.coverage_distances(probe_dirs(20000, d))
    assert float(dist.max()) <= delta * (1.0 + 1e-12)


def test_circle_net_meets_covering_lower_bound():
    # every point covers an arc of at most 2*arcsin(delta/2) half-width, so a
    # covering needs at least pi / (2 arcsin(delta/2)) points
    for delta in (0.3, 0.1):
        net = build_net(2, delta, seed=9)
        min_needed = math.floor(math.pi / (2.0 * math.asin(delta / 2.0)))
        assert len(net.points) >= min_needed


def test_build_net_deterministic():
    a = build_net(2, 0.2, seed=5)
    b = build_net(2, 0.2, seed=5)
    np.testing.assert_array_equal(a.points, b.points)
    c = build_net(2, 0.2, seed=6)
    assert len(c.points) != len(a.points) or not np.array_equal(c.points, a.points)


def test_short_streak_still_certified():
    net = build_net(3, 0.15, seed=1, streak=50)
    assert net.certified
    assert net.cover_radius <= 0.15 * (1.0 + 1e-12)
    assert net.min_pairwise_distance() >= 0.15 * (1.0 - 1e-12)


def test_repair_disabled_is_uncertified():
    net = build_net(2, 0.2, seed=5, repair=False)
    assert not net.certified
    assert math.isnan(net.cover_radius)


def test_default_streak_values():
    assert default_streak(2, 0.1) == 500
    assert default_streak(3, 0.1) == 5000


def test_build_net_rejects_bad_arguments():
    with pytest.raises(ValueError):
        build_net(1, 0.1, seed=0)
    with pytest.raises(ValueError):
        build_net(2, 0.0, seed=0)
    with pytest.raises(ValueError):
        build_net(2, 1.5, seed=0)


def test_higher_dimension_probe_repair():
    net = build_net(4, 0.5, seed=2, streak=200)
    dist = net.coverage_distances(probe_dirs(20000, 4))
    assert float(dist.max()) <= 0.5
    assert net.min_pairwise_distance() >= 0.5 * (1.0 - 1e-12)


# ---------------------------------------------------------------------------
# decomposition


@pytest.mark.parametrize("delta", [0.3, 0.1])
def test_decompose_error_shrinks_geometrically(delta):
    net = build_net(2, delta, seed=11)
    u = np.array([math.cos(0.4), math.sin(0.4)])
    for depth in (0, 2, 5, 8):
        dec = decompose(net, u, depth)
        assert dec.error <= delta ** (depth + 1) + 1e-15


def test_decompose_reconstruction_identity():
    net = build_net(3, 0.2, seed=13)
    u = np.array([1.0, 2.0, -0.5])
    u /= np.linalg.norm(u)
    dec = decompose(net, u, depth=6)
    np.testing.assert_allclose(dec.approximation(net), u - dec.residual, atol=1e-12)


def test_decompose_coefficients_bounded_by_powers():
    delta = 0.25
    net = build_net(2, delta, seed=17)
    u = np.array([0.6, -0.8])
    dec = decompose(net, u, depth=7)
    for j, (coeff, _) in enumerate(dec.terms, start=1):
        assert abs(coeff) <= delta**j + 1e-12


def test_decompose_of_net_point_is_exact():
    net = build_net(2, 0.2, seed=19)
    dec = decompose(net, net.points[3], depth=4)
    assert dec.error <= 1e-12


# ---------------------------------------------------------------------------
# certified sup bounds


def test_certified_sup_dominates_true_gap():
    net = build_net(2, 0.05, seed=23)
    # nested balls: the support gap is exactly 0.3 in every direction
    net_sup, certified = certified_sup_deficit(
        net, lambda u: np.ones(len(u)), lambda u: 0.7 * np.ones(len(u))
    )
    assert net_sup == pytest.approx(0.3, abs=1e-12)
    assert certified >= 0.3
    assert certified <= 2.0 * max(0.3, 4 * 0.05) + 1e-12


def test_certified_sup_requires_fine_net():
    net = build_net(2, 0.8, seed=23)
    with pytest.raises(ValueError):
        certified_sup_deficit(
            net, lambda u: np.ones(len(u)), lambda u: np.zeros(len(u))
        )


# ---------------------------------------------------------------------------
# serialization


def test_net_save_load_round_trip(tmp_path):
    net = build_net(3, 0.25, seed=29)
    path = tmp_path / "net.json"
    save_net(net, path)
    back = load_net(path)
    assert back.dim == net.dim
    assert back.delta == net.delta
    assert back.certified == net.certified
    assert back.cover_radius == net.cover_radius
    np.testing.assert_array_equal(back.points, net.points)
