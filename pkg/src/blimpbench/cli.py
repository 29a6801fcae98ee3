"""Command-line interface.

Exit codes: 0 success (and, for ``check``, all checks pass), 1 feasibility
failure, 2 bad input (file/parse/argument errors).  Diagnostics go to
stderr, results to stdout.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .design import DesignError, DesignSpec, parse_design
from .feasibility import evaluate_design
from .mapping import CommandError, parse_command
from .performance import FeasibilityFailure, max_performance
from .reporting import (
    format_command,
    format_feasibility,
    format_payload,
    format_performance,
    num,
)
from .simulator import SimConfig, run, trajectory_csv

EXIT_OK = 0
EXIT_FEASIBILITY = 1
EXIT_INPUT = 2


def _load_design(path: str) -> DesignSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SystemExit(_fail(f"cannot read {path}: {exc}"))
    try:
        return parse_design(text)
    except DesignError as exc:
        raise SystemExit(_fail(f"{path}: {exc}"))


def _fail(message: str) -> int:
    print(message, file=sys.stderr)
    return EXIT_INPUT


def cmd_check(args: argparse.Namespace) -> int:
    design = _load_design(args.design)
    report = evaluate_design(design, tol=args.tol)
    print(f"design: {design.name}")
    print(format_feasibility(report))
    return EXIT_OK if (report.motion_pass and report.payload_ok) else EXIT_FEASIBILITY


def cmd_payload(args: argparse.Namespace) -> int:
    design = _load_design(args.design)
    report = evaluate_design(design)
    print(f"design: {design.name}")
    print(format_payload(report))
    return EXIT_OK


def cmd_perf(args: argparse.Namespace) -> int:
    design = _load_design(args.design)
    try:
        report = max_performance(design)
    except FeasibilityFailure as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_FEASIBILITY
    print(f"design: {design.name}")
    print(format_performance(report))
    return EXIT_OK


def cmd_sim(args: argparse.Namespace) -> int:
    design = _load_design(args.design)
    n = len(design.thrusters)
    duties = args.duty if args.duty is not None else [0.0] * n
    if len(duties) != n:
        return _fail(f"--duty needs {n} values (one per thruster), got {len(duties)}")
    if any(not -1.0 <= d <= 1.0 for d in duties):
        return _fail("duties must lie in [-1, 1]")
    try:
        config = SimConfig(dt=args.dt, integrator=args.integrator)
    except ValueError as exc:
        return _fail(str(exc))
    trajectory = run(design, duties, args.duration, config, carried_payload=args.payload)
    final = trajectory.final
    print(f"design: {design.name}")
    print(f"simulated: {num(final.time)} s at dt={num(config.dt)} ({config.integrator})")
    print(f"final speed: {num(final.speed)} m/s (horizontal {num(final.speed_h)} m/s)")
    steady_time = trajectory.steady_time
    if steady_time is not None:
        print(f"steady state reached at {num(steady_time)} s")
    else:
        print("steady state not reached")
    if args.csv:
        Path(args.csv).write_text(trajectory_csv(trajectory), encoding="utf-8")
        print(f"trajectory written to {args.csv}")
    return EXIT_OK


def cmd_remap_parse(args: argparse.Namespace) -> int:
    try:
        command = parse_command(args.command)
    except CommandError as exc:
        print(f"invalid command: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(format_command(command))
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import create_app

    frontend = Path(args.frontend) if args.frontend else None
    app = create_app(data_dir=args.data_dir, frontend_dir=frontend)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blimpbench",
        description="Design and evaluation workbench for indoor miniature blimps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run motion-primitive and payload checks")
    p.add_argument("design", help="design file (TOML)")
    p.add_argument("--tol", type=float, default=1e-6, help="coupling tolerance [N, N*m]")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("payload", help="envelope volume, buoyancy and payload")
    p.add_argument("design")
    p.set_defaults(func=cmd_payload)

    p = sub.add_parser("perf", help="steady-state performance report")
    p.add_argument("design")
    p.set_defaults(func=cmd_perf)

    p = sub.add_parser("sim", help="simulate constant-duty flight")
    p.add_argument("design")
    p.add_argument("--duration", type=float, required=True, help="seconds")
    p.add_argument("--duty", type=float, nargs="+", help="per-thruster duty in [-1, 1]")
    p.add_argument("--csv", help="write the trajectory to this CSV file")
    p.add_argument("--dt", type=float, default=0.02)
    p.add_argument(
        "--integrator", choices=("rk4", "semi_implicit_euler"), default="rk4"
    )
    p.add_argument(
        "--payload",
        type=float,
        default=None,
        help="carried payload [kg]; default ballasts to neutral buoyancy",
    )
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("remap-parse", help="parse a channel-mapping command string")
    p.add_argument("command")
    p.set_defaults(func=cmd_remap_parse)

    p = sub.add_parser("serve", help="start the HTTP/JSON service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data-dir", default=None, help="design store directory")
    p.add_argument("--frontend", default=None, help="static UI directory to serve")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
