"""Hull support estimators and distance/functional plug-ins."""

import math

import numpy as np
import pytest

from randhull.estimators import (
    HullSupport,
    d_l_estimate,
    functional_s,
    functional_t,
    hausdorff_to_body,
    hull_support,
    hull_support_batch,
    lp_error,
    support_values,
)
from randhull.geometry import Ball, support_batch
from randhull.nets import build_net
from randhull.sampling import SampleCloud, sample

BALL2 = Ball(center=[0.0, 0.0], radius=1.0)


def corner_cloud():
    """Four unit-norm points at 45-degree positions, a square inscribed in
    the unit circle."""
    ang = np.deg2rad([45.0, 135.0, 225.0, 315.0])
    pts = np.column_stack([np.cos(ang), np.sin(ang)])
    return SampleCloud(points=pts, body=BALL2, mode="boundary", seed=0, n=4)


def spaced_circle_cloud(m):
    ang = 2.0 * math.pi * np.arange(m) / m
    pts = np.column_stack([np.cos(ang), np.sin(ang)])
    return SampleCloud(points=pts, body=BALL2, mode="boundary", seed=0, n=m)


# ---------------------------------------------------------------------------
# hull support


def test_hull_support_is_max_of_dots():
    cloud = corner_cloud()
    s = math.sqrt(2.0) / 2.0
    assert hull_support(cloud, np.array([1.0, 0.0])) == pytest.approx(s, abs=1e-12)
    assert hull_support(cloud, np.array([s, s])) == pytest.approx(1.0, abs=1e-12)


def test_hull_support_batch_matches_single():
    cloud = sample(BALL2, "interior", 200, seed=31)
    dirs = np.array([[1.0, 0.0], [0.0, -1.0], [0.6, 0.8]])
    batch = hull_support_batch(cloud, dirs)
    singles = [hull_support(cloud, u) for u in dirs]
    np.testing.assert_allclose(batch, singles, atol=1e-14)


def test_hull_support_rejects_empty_cloud():
    empty = SampleCloud(
        points=np.empty((0, 2)), body=BALL2, mode="interior", seed=0, n=0
    )
    with pytest.raises(ValueError):
        hull_support_batch(empty, np.array([[1.0, 0.0]]))


def test_hull_never_exceeds_body_support():
    cloud = sample(BALL2, "interior", 500, seed=32)
    dirs = build_net(2, 0.1, seed=1).points
    hull_vals = hull_support_batch(cloud, dirs)
    body_vals = support_batch(BALL2, dirs)
    assert np.all(hull_vals <= body_vals + 1e-12)


def test_support_values_dispatch():
    cloud = corner_cloud()
    dirs = np.array([[1.0, 0.0], [0.0, 1.0]])
    from_cloud = support_values(cloud, dirs)
    from_callable = support_values(HullSupport(cloud), dirs)
    from_body = support_values(BALL2, dirs)
    np.testing.assert_allclose(from_cloud, from_callable, atol=1e-14)
    np.testing.assert_allclose(from_body, [1.0, 1.0], atol=1e-14)


# ---------------------------------------------------------------------------
# sup-distance plug-ins


def test_hausdorff_window_for_spaced_boundary_points():
    net = build_net(2, 0.01, seed=2)
    m = 4
    true_gap = 1.0 - math.cos(math.pi / m)
    res = hausdorff_to_body(BALL2, spaced_circle_cloud(m), net)
    # the net maximum never exceeds the true sup and misses it by at most
    # the Lipschitz constant (2 for unit-scale bodies) times the cover radius
    assert res.net_value <= true_gap + 1e-12
    assert res.net_value >= true_gap - 2.0 * net.cover_radius
    assert res.certified_upper >= true_gap - 1e-12
    assert res.net_delta == pytest.approx(0.01)


def test_hausdorff_shrinks_with_more_points():
    net = build_net(2, 0.02, seed=3)
    v_small = hausdorff_to_body(BALL2, spaced_circle_cloud(8), net).net_value
    v_large = hausdorff_to_body(BALL2, spaced_circle_cloud(64), net).net_value
    assert v_large < v_small


def test_dl_equals_hausdorff_for_centered_unit_ball():
    net = build_net(2, 0.05, seed=4)
    cloud = sample(BALL2, "interior", 300, seed=33)
    dh = hausdorff_to_body(BALL2, cloud, net).net_value
    dl = d_l_estimate(BALL2, np.zeros(2), cloud, net)
    assert dl == pytest.approx(dh, abs=1e-12)


def test_dl_rejects_non_interior_center():
    net = build_net(2, 0.05, seed=4)
    cloud = sample(BALL2, "interior", 50, seed=34)
    with pytest.raises(ValueError):
        d_l_estimate(BALL2, np.array([1.5, 0.0]), cloud, net)


# ---------------------------------------------------------------------------
# averaged metrics and functionals


def test_lp_error_square_in_circle_closed_form():
    # mean support deficit of the inscribed square: 1 - 2*sqrt(2)/pi
    val = lp_error(BALL2, corner_cloud(), p=1.0, quad_n=200000, quad_seed=8)
    assert val == pytest.approx(1.0 - 2.0 * math.sqrt(2.0) / math.pi, abs=1e-3)


def test_lp_error_infinite_p_is_sup_deficit():
    cloud = spaced_circle_cloud(16)
    val = lp_error(BALL2, cloud, p=math.inf, quad_n=100000, quad_seed=9)
    true_gap = 1.0 - math.cos(math.pi / 16)
    assert val <= true_gap + 1e-12
    assert val >= true_gap * 0.98


def test_lp_error_rejects_small_p():
    with pytest.raises(ValueError):
        lp_error(BALL2, corner_cloud(), p=0.5, quad_n=100, quad_seed=0)


def test_mean_width_of_body_is_exact_for_ball():
    # every direction gives width 2 for the unit ball, so the sampled mean
    # is exactly 2 regardless of the quadrature draw
    assert functional_s(BALL2, 1.0, 512, quad_seed=10) == pytest.approx(
        2.0, abs=1e-12
    )


def test_mean_width_of_inscribed_square():
    val = functional_s(corner_cloud(), 1.0, 200000, quad_seed=11)
    assert val == pytest.approx(4.0 * math.sqrt(2.0) / math.pi, abs=2e-3)


def test_sup_functional_of_cloud_near_one():
    val = functional_t(corner_cloud(), math.inf, 4096, quad_seed=12)
    assert 1.0 - 5e-4 <= val <= 1.0 + 1e-12


def test_functional_consistency_body_vs_exact_hull():
    # a dense boundary cloud nearly reproduces the body functional
    cloud = spaced_circle_cloud(512)
    body_val = functional_t(BALL2, 2.0, 4096, quad_seed=13)
    cloud_val = functional_t(cloud, 2.0, 4096, quad_seed=13)
    assert cloud_val == pytest.approx(body_val, rel=1e-3)
    assert cloud_val <= body_val + 1e-12
