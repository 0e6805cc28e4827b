"""Command-line entry points.

Subcommands: sample, net build, distance, bound, check-class, rates,
deviation, lower-bound-family.  Shared flags (--seed, --threads, --out,
--format, --config) attach to every subcommand.  Results go to --out when
given, otherwise to stdout; CSV schemas match the report writers.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bounds import ClassParams, check_class_membership, deviation_bound, fit_class_l
from .estimators import hausdorff_to_body
from .experiments import (
    ExperimentConfig,
    body_to_dict,
    build_lower_bound_family,
    bump_volume_defect_exact,
    emit_report,
    load_experiment_config,
    report_to_csv,
    run_deviation_experiment,
    run_rate_experiment,
)
from .geometry import load_body
from .nets import build_net, load_net, net_to_dict, save_net
from .sampling import SampleCloud, load_points, points_to_csv, sample


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="master seed override")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--config", default=None, help="experiment config (YAML)")


def _emit_text(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _emit_json(doc, out: str | None) -> None:
    _emit_text(json.dumps(doc, sort_keys=True, indent=2) + "\n", out)


def _seed_or(args, fallback: int = 0) -> int:
    return fallback if args.seed is None else args.seed


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_sample(args) -> int:
    body = load_body(args.body)
    cloud = sample(body, args.mode, args.n, _seed_or(args))
    _emit_text(points_to_csv(cloud.points), args.out)
    return 0


def _cmd_net_build(args) -> int:
    net = build_net(args.d, args.delta, _seed_or(args), streak=args.streak)
    if args.out is None:
        _emit_json(net_to_dict(net), None)
    else:
        save_net(net, args.out)
    return 0


def _cmd_distance(args) -> int:
    body = load_body(args.body)
    points = load_points(args.points)
    cloud = SampleCloud(
        points=points, body=body, mode=args.mode, seed=_seed_or(args), n=len(points)
    )
    if args.net is not None:
        net = load_net(args.net)
    else:
        net = build_net(body.dim, args.net_delta, _seed_or(args))
    res = hausdorff_to_body(body, cloud, net)
    doc = {
        "net_value": res.net_value,
        "certified_upper": res.certified_upper,
        "net_delta": res.net_delta,
    }
    if args.format == "csv":
        text = "net_value,certified_upper,net_delta\n"
        text += f"{res.net_value!r},{res.certified_upper!r},{res.net_delta!r}\n"
        _emit_text(text, args.out)
    else:
        _emit_json(doc, args.out)
    return 0


def _cmd_bound(args) -> int:
    params = ClassParams.from_dict(json.loads(args.params))
    ev = deviation_bound(params, args.d, args.n, args.x)
    if args.format == "csv":
        text = "x,threshold,tail,a_n,b_n,tau1\n"
        text += f"{ev.x!r},{ev.threshold!r},{ev.tail!r},{ev.a_n!r},{ev.b_n!r},{ev.tau1!r}\n"
        _emit_text(text, args.out)
    else:
        _emit_json(ev.to_dict(), args.out)
    return 0


def _cmd_check_class(args) -> int:
    body = load_body(args.body)
    kw = dict(
        u_probes=args.u_probes,
        eps_grid=args.eps_grid,
        n_mc=args.n_mc,
        seed=_seed_or(args),
    )
    if args.family == "fit":
        if args.alpha is None or args.eps0 is None:
            raise SystemExit("--family fit needs --alpha and --eps0")
        params = fit_class_l(body, args.mode, args.alpha, args.eps0, **kw)
        report = check_class_membership(body, args.mode, params, **kw)
        _emit_json({"fitted": params.to_dict(), "report": report.to_dict()}, args.out)
        return 0
    from .bounds import class_params_boundary, class_params_smooth

    maker = class_params_smooth if args.family == "smooth" else class_params_boundary
    params = maker(body.dim, args.r)
    report = check_class_membership(body, args.mode, params, **kw)
    _emit_json(report.to_dict(), args.out)
    return 0


def _load_config_with_overrides(args) -> ExperimentConfig:
    if args.config is None:
        raise SystemExit("this subcommand needs --config")
    config = load_experiment_config(args.config)
    if args.seed is not None:
        config.master_seed = args.seed
    return config


def _emit_report_like(report, args, default_fmt: str) -> int:
    fmt = args.format or default_fmt
    if args.out is None:
        if fmt == "csv":
            sys.stdout.write(report_to_csv(report))
        else:
            _emit_json(report.to_dict(), None)
    else:
        emit_report(report, args.out, fmt)
    return 0


def _cmd_rates(args) -> int:
    config = _load_config_with_overrides(args)
    report = run_rate_experiment(config, threads=args.threads)
    return _emit_report_like(report, args, "csv")


def _cmd_deviation(args) -> int:
    config = _load_config_with_overrides(args)
    x_grid = np.linspace(0.0, args.x_max, args.x_points)
    report = run_deviation_experiment(config, x_grid, threads=args.threads)
    return _emit_report_like(report, args, "csv")


def _cmd_lower_bound_family(args) -> int:
    bodies = build_lower_bound_family(args.d, args.big_r, args.delta, args.alpha_bump)
    doc = {
        "bodies": [body_to_dict(b) for b in bodies],
        "packing_size": len(bodies) - 1,
        "pairwise_hausdorff": args.alpha_bump * args.delta**2,
        "volume_defect": bump_volume_defect_exact(bodies[1]),
    }
    _emit_json(doc, args.out)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="randhull",
        description="Random-polytope estimation of convex bodies: sampling, "
        "nets, distances, deviation bounds and rate experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw a seeded cloud and write points CSV")
    _common_flags(p)
    p.add_argument("--body", required=True, help="body spec JSON")
    p.add_argument("--mode", choices=("interior", "boundary"), default="interior")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_cmd_sample)

    p_net = sub.add_parser("net", help="sphere net operations")
    net_sub = p_net.add_subparsers(dest="net_command", required=True)
    p = net_sub.add_parser("build", help="build a packing/covering net")
    _common_flags(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--streak", type=int, default=None)
    p.set_defaults(func=_cmd_net_build)

    p = sub.add_parser("distance", help="Hausdorff deficit of a cloud's hull")
    _common_flags(p)
    p.add_argument("--body", required=True)
    p.add_argument("--points", required=True, help="points CSV")
    p.add_argument("--net", default=None, help="net JSON (else built on the fly)")
    p.add_argument("--net-delta", type=float, default=1e-2)
    p.add_argument("--mode", choices=("interior", "boundary"), default="interior")
    p.set_defaults(func=_cmd_distance)

    p = sub.add_parser("bound", help="deviation-bound threshold and tail")
    _common_flags(p)
    p.add_argument("--params", required=True, help='JSON {"alpha":..,"L":..,"eps0":..}')
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=float, required=True)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("check-class", help="probe the cap-mass class condition")
    _common_flags(p)
    p.add_argument("--body", required=True)
    p.add_argument("--mode", choices=("interior", "boundary"), default="interior")
    p.add_argument("--family", choices=("smooth", "boundary", "fit"), required=True)
    p.add_argument("--r", type=float, default=1.0, help="rolling-ball radius")
    p.add_argument("--alpha", type=float, default=None, help="for --family fit")
    p.add_argument("--eps0", type=float, default=None, help="for --family fit")
    p.add_argument("--u-probes", type=int, default=64)
    p.add_argument("--eps-grid", type=int, default=64)
    p.add_argument("--n-mc", type=int, default=100_000)
    p.set_defaults(func=_cmd_check_class)

    p = sub.add_parser("rates", help="convergence-rate experiment from a config")
    _common_flags(p)
    p.set_defaults(func=_cmd_rates)

    p = sub.add_parser("deviation", help="tail-domination experiment from a config")
    _common_flags(p)
    p.add_argument("--x-max", type=float, default=30.0)
    p.add_argument("--x-points", type=int, default=61)
    p.set_defaults(func=_cmd_deviation)

    p = sub.add_parser("lower-bound-family", help="dented-ball minimax family")
    _common_flags(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--R", dest="big_r", type=float, default=1.0)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--alpha-bump", type=float, default=0.01)
    p.set_defaults(func=_cmd_lower_bound_family)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
