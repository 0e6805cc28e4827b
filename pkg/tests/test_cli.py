"""Command-line entry points, exercised through main(argv)."""

import json

import numpy as np
import pytest

from randhull.cli import main
from randhull.geometry import Ball, save_body
from randhull.nets import load_net
from randhull.sampling import load_points
from randhull.experiments import ExperimentConfig, save_experiment_config


@pytest.fixture
def ball_path(tmp_path):
    path = tmp_path / "ball.json"
    save_body(Ball(center=[0.0, 0.0], radius=1.0), path)
    return path


@pytest.fixture
def config_path(tmp_path):
    cfg = ExperimentConfig(
        body=Ball(center=[0.0, 0.0], radius=1.0),
        mode="interior",
        family="smooth_interior",
        n_grid=[200, 800],
        reps=6,
        metric="hausdorff",
        net_delta=0.05,
        master_seed=12,
    )
    path = tmp_path / "config.yaml"
    save_experiment_config(cfg, path)
    return path


def test_sample_writes_points_csv(tmp_path, ball_path):
    out = tmp_path / "points.csv"
    main(
        [
            "sample",
            "--body", str(ball_path),
            "--mode", "interior",
            "--n", "40",
            "--seed", "5",
            "--out", str(out),
        ]
    )
    pts = load_points(out)
    assert pts.shape == (40, 2)
    assert np.all(np.linalg.norm(pts, axis=1) <= 1.0)


def test_sample_is_seed_deterministic(tmp_path, ball_path):
    outs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        main(
            ["sample", "--body", str(ball_path), "--n", "25", "--seed", "9", "--out", str(out)]
        )
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_net_build_writes_certified_net(tmp_path):
    out = tmp_path / "net.json"
    main(["net", "build", "--d", "2", "--delta", "0.2", "--seed", "3", "--out", str(out)])
    net = load_net(out)
    assert net.dim == 2
    assert net.certified
    assert net.cover_radius <= 0.2


def test_distance_reports_deficit(tmp_path, ball_path):
    pts = tmp_path / "points.csv"
    main(["sample", "--body", str(ball_path), "--n", "200", "--seed", "7", "--out", str(pts)])
    out = tmp_path / "distance.json"
    main(
        [
            "distance",
            "--body", str(ball_path),
            "--points", str(pts),
            "--net-delta", "0.05",
            "--seed", "1",
            "--format", "json",
            "--out", str(out),
        ]
    )
    doc = json.loads(out.read_text())
    assert 0.0 <= doc["net_value"] <= 2.0
    assert doc["certified_upper"] >= doc["net_value"]
    assert doc["net_delta"] == 0.05


def test_distance_accepts_prebuilt_net(tmp_path, ball_path):
    net_path = tmp_path / "net.json"
    main(["net", "build", "--d", "2", "--delta", "0.1", "--seed", "2", "--out", str(net_path)])
    pts = tmp_path / "points.csv"
    main(["sample", "--body", str(ball_path), "--n", "100", "--seed", "8", "--out", str(pts)])
    out = tmp_path / "distance.json"
    main(
        [
            "distance",
            "--body", str(ball_path),
            "--points", str(pts),
            "--net", str(net_path),
            "--format", "json",
            "--out", str(out),
        ]
    )
    assert json.loads(out.read_text())["net_delta"] == 0.1


def test_bound_evaluates_tail(tmp_path):
    out = tmp_path / "bound.json"
    main(
        [
            "bound",
            "--params", '{"alpha": 1.5, "L": 0.4244, "eps0": 1.0}',
            "--d", "2",
            "--n", "10000",
            "--x", "20.0",
            "--format", "json",
            "--out", str(out),
        ]
    )
    doc = json.loads(out.read_text())
    assert doc["threshold"] > 0.0
    assert 0.0 <= doc["tail"] <= 1.0


def test_check_class_smooth_ball(tmp_path, ball_path):
    out = tmp_path / "class.json"
    main(
        [
            "check-class",
            "--body", str(ball_path),
            "--mode", "interior",
            "--family", "smooth",
            "--r", "1.0",
            "--format", "json",
            "--out", str(out),
        ]
    )
    doc = json.loads(out.read_text())
    assert doc["verdict"] is True
    assert doc["analytic"] is True


def test_rates_csv_schema(tmp_path, config_path):
    out = tmp_path / "rates.csv"
    main(["rates", "--config", str(config_path), "--out", str(out)])
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "n,mean_metric_q,stderr,reps"
    assert len(lines) == 3


def test_rates_json_and_seed_override(tmp_path, config_path):
    out1 = tmp_path / "r1.json"
    out2 = tmp_path / "r2.json"
    main(["rates", "--config", str(config_path), "--format", "json", "--out", str(out1)])
    main(
        [
            "rates",
            "--config", str(config_path),
            "--format", "json",
            "--seed", "999",
            "--out", str(out2),
        ]
    )
    d1, d2 = json.loads(out1.read_text()), json.loads(out2.read_text())
    assert d1["config"]["master_seed"] == 12
    assert d2["config"]["master_seed"] == 999
    assert d1["means"] != d2["means"]


def test_deviation_csv_schema(tmp_path, ball_path):
    cfg = ExperimentConfig(
        body=Ball(center=[0.0, 0.0], radius=1.0),
        mode="interior",
        family="smooth_interior",
        n_grid=[400],
        reps=10,
        metric="hausdorff",
        net_delta=0.05,
        master_seed=12,
    )
    cpath = ball_path.parent / "dev.yaml"
    save_experiment_config(cfg, cpath)
    out = ball_path.parent / "dev.csv"
    main(
        [
            "deviation",
            "--config", str(cpath),
            "--x-max", "6.0",
            "--x-points", "4",
            "--out", str(out),
        ]
    )
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "x,threshold,empirical_survival,theoretical_tail"
    assert len(lines) == 5


def test_lower_bound_family_json(tmp_path):
    out = tmp_path / "family.json"
    main(
        [
            "lower-bound-family",
            "--d", "2",
            "--R", "1.0",
            "--delta", "0.2",
            "--alpha-bump", "0.02",
            "--seed", "4",
            "--format", "json",
            "--out", str(out),
        ]
    )
    doc = json.loads(out.read_text())
    assert doc["packing_size"] >= 10
    assert doc["pairwise_hausdorff"] == pytest.approx(0.02 * 0.2**2, abs=1e-10)
    assert doc["bodies"][0]["kind"] == "ball"
    assert all(b["kind"] == "bump_ball" for b in doc["bodies"][1:])


def test_missing_required_flag_exits_nonzero(ball_path):
    with pytest.raises(SystemExit):
        main(["sample", "--n", "10"])
