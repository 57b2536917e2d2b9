"""Command-line surface: predict, fit, analyze, simulate, serve.

Angles are degrees on the command line (matching lab practice) and
radians internally. Every output file starts with a comment header
carrying the tool version, the resolved config hash and the seed, so
identical invocations produce byte-identical files.

Exit codes: 0 success, 2 bad input, 3 scenario failure verdict.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .arena import build_scenario, canonical_scenario, run_scenario, write_simlog_csv
from .config import RunConfig, load_run_config
from .errors import RingbotError, StraightLineMotion
from .estimation import (
    ParamCurves,
    extract_motion_params_detailed,
    fit_param_curves,
    predict_at_gamma,
    segment_periods,
)
from .kinematics import (
    MotionParams,
    Pose,
    iterate_trajectory,
    max_periods,
    orbit_radius_estimate,
    orbit_radius_exact,
)
from .tracks import MarkerTrack, TrackFile, parse_track, write_trajectory_csv

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_SCENARIO_FAILED = 3


def _radius_summary(params: MotionParams) -> dict:
    try:
        est = orbit_radius_estimate(params)
        exact = orbit_radius_exact(params)
    except StraightLineMotion:
        est = exact = math.inf
    # strict JSON has no Infinity literal
    return {"orbit_radius_estimate": "inf" if math.isinf(est) else est,
            "orbit_radius_exact": "inf" if math.isinf(exact) else exact}


def _parse_start(text: str | None) -> tuple[float, float, float] | None:
    if text is None:
        return None
    try:
        x, y, heading_deg = (float(v) for v in text.split(","))
    except ValueError:
        raise ValueError(f"start must be 'x,y,heading_deg', got {text!r}")
    return (x, y, math.radians(heading_deg))


def _config_from_args(args) -> RunConfig:
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    for attr, key in (
        ("scenario", "scenario.name"),
        ("square_side", "scenario.square_side"),
        ("max_periods", "scenario.max_periods"),
        ("slide_efficiency", "scenario.slide_efficiency"),
        ("stall_limit", "scenario.stall_limit"),
        ("lap_tol", "scenario.lap_tol"),
        ("gamma", "scenario.gamma_deg"),
    ):
        value = getattr(args, attr, None)
        if value is not None:
            overrides[key] = value
    return load_run_config(getattr(args, "config", None), overrides)


def cmd_predict(args) -> int:
    cfg = _config_from_args(args)
    curves = ParamCurves.load(args.curves)
    params = predict_at_gamma(curves, math.radians(args.gamma))
    if args.total_time is not None:
        periods = max_periods(args.total_time, params.period_T)
    else:
        periods = args.periods
    start = _parse_start(args.start) or (0.0, 0.0, 0.0)
    traj = iterate_trajectory(
        params, Pose.from_heading(*start), periods)
    summary = {
        "gamma_deg": args.gamma,
        "delta_phi_deg": math.degrees(params.delta_phi),
        "delta_x": params.delta_x,
        "period_T": params.period_T,
        "beta_deg": math.degrees(params.beta),
        "periods": periods,
        **_radius_summary(params),
    }
    header = cfg.header_lines() + [f"predict gamma_deg={args.gamma!r}"]
    if args.out:
        write_trajectory_csv(args.out, traj, header)
        print(json.dumps(summary, sort_keys=True))
    else:
        for line in header:
            print(f"# {line}")
        print("k,t,x,y,heading")
        for k, t, x, y, heading in traj.to_rows():
            print(f"{k},{t!r},{x!r},{y!r},{heading!r}")
        print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    return EXIT_OK


def _parse_track_spec(spec: str) -> tuple[float, str, int | None]:
    parts = spec.split(":")
    if len(parts) < 2:
        raise ValueError(
            f"track spec must be GAMMA_DEG:PATH[:PERIODS], got {spec!r}")
    gamma_deg = float(parts[0])
    periods = None
    if len(parts) >= 3 and parts[-1].isdigit():
        periods = int(parts[-1])
        path = ":".join(parts[1:-1])
    else:
        path = ":".join(parts[1:])
    return gamma_deg, path, periods


def _auto_periods(track) -> tuple[MarkerTrack, int]:
    """Crop a track to whole periods found by speed-dip segmentation."""
    boundaries = segment_periods(track)
    mask = (track.t >= boundaries[0] - 1e-12) & (track.t <= boundaries[-1] + 1e-12)
    cropped = MarkerTrack(
        t=track.t[mask], xy=track.xy[mask],
        heading=None if track.heading is None else track.heading[mask],
    )
    return cropped, len(boundaries) - 1


def cmd_fit(args) -> int:
    cfg = _config_from_args(args)
    observations = []
    table = []
    errors = []
    for spec in args.tracks:
        try:
            gamma_deg, path, periods = _parse_track_spec(spec)
            track = parse_track(TrackFile(path, unit=args.unit))
            if periods is None:
                track, periods = _auto_periods(track)
            params, details = extract_motion_params_detailed(track, periods)
            observations.append((math.radians(gamma_deg), params))
            table.append((gamma_deg, params, details))
        except (RingbotError, OSError, ValueError) as exc:
            errors.append(f"{spec}: {exc}")
    if errors:
        for err in errors:
            print(f"error: {err}", file=sys.stderr)
        return EXIT_BAD_INPUT
    print(f"{'gamma':>7} {'R_fit':>9} {'dphi_deg':>9} {'dx':>9} "
          f"{'beta_deg':>9} {'T':>7}")
    for gamma_deg, params, details in table:
        r_fit = details.circle.radius if details.circle else math.inf
        print(f"{gamma_deg:7.1f} {r_fit:9.4f} "
              f"{math.degrees(params.delta_phi):9.3f} {params.delta_x:9.4f} "
              f"{math.degrees(params.beta):9.3f} {params.period_T:7.3f}")
    curves = fit_param_curves(observations, families=cfg.families)
    curves.save(args.out)
    residuals = {name: curves.curve(name).residual
                 for name in ("delta_phi", "delta_x", "period_T", "beta")}
    print(json.dumps({"out": str(args.out), "residuals": residuals},
                     sort_keys=True))
    return EXIT_OK


def cmd_analyze(args) -> int:
    track = parse_track(TrackFile(args.track, unit=args.unit))
    if args.periods is not None:
        periods = args.periods
    else:
        track, periods = _auto_periods(track)
    params, details = extract_motion_params_detailed(track, periods)
    out = {
        "periods": periods,
        "delta_phi_deg": math.degrees(params.delta_phi),
        "delta_x": params.delta_x,
        "period_T": params.period_T,
        "beta_deg": math.degrees(params.beta),
        "straight_line": details.straight_line,
        "heading_from_marker": details.heading_from_marker,
        **_radius_summary(params),
    }
    if details.circle:
        out["circle"] = {
            "center": list(details.circle.center),
            "radius": details.circle.radius,
            "radius_std": details.circle.radius_std,
        }
        out["delta_x_from_radius"] = details.delta_x_from_radius
    if track.issues:
        out["rejected_rows"] = track.issues
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _config_from_args(args)
    sc = cfg.scenario
    name = canonical_scenario(sc.name)
    curves = params = None
    if args.curves:
        curves = ParamCurves.load(args.curves)
    else:
        if args.delta_phi is None or args.delta_x is None or args.period is None:
            raise ValueError(
                "simulate needs either --curves or all of "
                "--delta-phi/--delta-x/--period")
        params = MotionParams(
            delta_phi=math.radians(args.delta_phi),
            delta_x=args.delta_x,
            period_T=args.period,
            beta=math.radians(args.beta),
        )
    start = _parse_start(args.start)
    arena, state = build_scenario(
        name,
        square_side=sc.square_side,
        wall_offset=sc.wall_offset,
        robot_radius=cfg.robot.contact_radius,
        gamma=math.radians(sc.gamma_deg),
        start=start,
    )
    log = run_scenario(
        name, arena, state, sc.max_periods,
        params=params, curves=curves,
        substeps=sc.substeps, slide_efficiency=sc.slide_efficiency,
        penetration_tol=sc.penetration_tol, stall_limit=sc.stall_limit,
        lap_tol=sc.lap_tol,
    )
    if args.out:
        header = cfg.header_lines() + [f"simulate scenario={name}"]
        write_simlog_csv(args.out, log, header)
    print(json.dumps(log.verdict, sort_keys=True))
    ok = log.verdict.get("ok", False) and not log.verdict.get("stuck", False)
    return EXIT_OK if ok else EXIT_SCENARIO_FAILED


def cmd_serve(args) -> int:
    from . import server

    cfg = _config_from_args(args)
    curves = ParamCurves.load(args.curves)
    server.serve_forever(
        host=args.host,
        port=args.port,
        curves=curves,
        scenario=canonical_scenario(args.scenario),
        speed_factor=args.speed_factor,
        recording_dir=args.recording_dir,
        run_config=cfg,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="ringbot",
        description="Everting ring robot: trajectory prediction, track "
                    "analysis, arena simulation and live steering.",
    )
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="TOML config file")
        p.add_argument("--seed", type=int, help="RNG seed recorded in outputs")

    p = sub.add_parser("predict", help="trajectory from fitted curves")
    common(p)
    p.add_argument("--gamma", type=float, required=True,
                   help="mass-distribution angle, degrees")
    p.add_argument("--curves", required=True, help="fitted curves JSON")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--periods", type=int)
    group.add_argument("--total-time", type=float,
                       help="seconds; converted via the fitted period")
    p.add_argument("--start", help="x,y,heading_deg (default 0,0,0)")
    p.add_argument("-o", "--out", help="CSV path (default: stdout)")
    p.set_defaults(fn=cmd_predict)

    p = sub.add_parser("fit", help="fit gamma-dependence curves from tracks")
    common(p)
    p.add_argument("tracks", nargs="+",
                   help="track specs GAMMA_DEG:PATH[:PERIODS]")
    p.add_argument("--unit", default="m", choices=["m", "mm", "cm"])
    p.add_argument("-o", "--out", default="curves.json")
    p.set_defaults(fn=cmd_fit)

    p = sub.add_parser("analyze", help="extract motion parameters from one track")
    common(p)
    p.add_argument("track")
    p.add_argument("--periods", type=int,
                   help="period count (default: speed-dip auto-segmentation)")
    p.add_argument("--unit", default="m", choices=["m", "mm", "cm"])
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("simulate", help="run an arena scenario")
    common(p)
    p.add_argument("--scenario", default="boundary_lap",
                   help="free | avoidance | boundary_lap")
    p.add_argument("--curves", help="fitted curves JSON (with --gamma)")
    p.add_argument("--gamma", type=float, help="gamma, degrees")
    p.add_argument("--delta-phi", type=float, help="turn per period, degrees")
    p.add_argument("--delta-x", type=float, help="travel per period, m")
    p.add_argument("--period", type=float, help="period duration, s")
    p.add_argument("--beta", type=float, default=0.0,
                   help="moving direction, degrees")
    p.add_argument("--max-periods", type=int, dest="max_periods")
    p.add_argument("--square-side", type=float, dest="square_side")
    p.add_argument("--slide-efficiency", type=float, dest="slide_efficiency")
    p.add_argument("--stall-limit", type=int, dest="stall_limit")
    p.add_argument("--lap-tol", type=float, dest="lap_tol")
    p.add_argument("--start", help="x,y,heading_deg")
    p.add_argument("-o", "--out", help="sim log CSV path")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("serve", help="live steering session server")
    common(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8770)
    p.add_argument("--curves", required=True, help="fitted curves JSON")
    p.add_argument("--scenario", default="free")
    p.add_argument("--speed-factor", type=float, default=10.0,
                   help="sim periods per period_T of wall time")
    p.add_argument("--recording-dir", default="recordings")
    p.set_defaults(fn=cmd_serve)
    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (RingbotError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
