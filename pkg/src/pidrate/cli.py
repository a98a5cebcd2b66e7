"""Command-line entry point.

    pidrate simulate   --config fig12_ratio12.json --out run.csv [--plot run.svg]
    pidrate sweep-phi  --ratios 1.2:1.6:0.05 --target-years 1 --out phi.csv
    pidrate pool-curve --amp 100 --out curve.csv

Exit codes: 0 success, 1 usage/config error, 2 computational error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import Optional, Sequence

from pidrate import kernel, sim
from pidrate.config import (
    SCENARIO_SCHEMA,
    SWEEP_SCHEMA,
    bundled_configs,
    controller_from_dict,
    load_json,
    scenario_from_dict,
)
from pidrate.errors import BracketingError, ConfigError, ConvergenceError, FixedOverflowError, PoolError
from pidrate.fixed import ZERO, Fixed, fx
from pidrate.stableswap import price_curve
from pidrate.svg import line_chart

log = logging.getLogger("pidrate")

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE = 0, 1, 2


def write_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _decimal(value: str) -> Fixed:
    try:
        return fx(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def cmd_simulate(args: argparse.Namespace) -> int:
    data = load_json(args.config, SCENARIO_SCHEMA)
    scenario = scenario_from_dict({k: v for k, v in data.items() if k not in ("out", "plot", "description")})
    out = args.out or data.get("out")
    plot = args.plot or data.get("plot")
    if not out:
        raise ConfigError("no output path: pass --out or set 'out' in the config")
    result = sim.run(scenario)
    write_atomic(out, result.to_csv())
    if plot:
        t = [float(v) for v in result.column("t")]
        svg = line_chart(
            t,
            [("rate", [float(v) for v in result.column("rate")]),
             ("tcr_mcr", [float(v) for v in result.column("tcr_mcr")])],
            x_label="t (years)",
            title=Path(args.config).stem,
        )
        write_atomic(plot, svg)
    print(result.summary())
    return EXIT_OK


def cmd_sweep_phi(args: argparse.Namespace) -> int:
    data = load_json(args.config, SWEEP_SCHEMA) if args.config else {}
    ratios_spec = args.ratios or data.get("ratios")
    if not ratios_spec:
        raise ConfigError("no ratio range: pass --ratios start:stop:step")
    ratios = sim.parse_range(ratios_spec)
    target = args.target_years or fx(data.get("target_years", "1"))
    held = args.held_weight or fx(data.get("held_weight", "0.7"))
    tol = args.tol or fx(data.get("tol", str(sim.DEFAULT_TOL)))
    dt = args.dt or (fx(data["dt"]) if "dt" in data else sim.DEFAULT_DT)
    workers = args.workers or data.get("workers", 1)
    out = args.out or data.get("out")
    plot = args.plot or data.get("plot")
    if not out:
        raise ConfigError("no output path: pass --out or set 'out' in the config")
    cfg = controller_from_dict(data.get("controller_cfg"))
    table = sim.sweep_phi(ratios, target, held, cfg, dt=dt, tol=tol, workers=workers)
    lines = ["ratio,phi_star"] + [f"{r.to_decimal_string(pad=True)},{p.to_decimal_string(pad=True)}" for r, p in table]
    write_atomic(out, "\n".join(lines) + "\n")
    if plot:
        svg = line_chart(
            [float(r) for r, _ in table],
            [("phi_star", [float(p) for _, p in table])],
            x_label="initial TCR/MCR",
            title=f"phi for recovery in {target} years",
        )
        write_atomic(plot, svg)
    print(f"ratios={len(table)} target_years={target} tol={tol}")
    return EXIT_OK


def cmd_pool_curve(args: argparse.Namespace) -> int:
    weights = sim.parse_range(args.weights)
    for w in weights:
        if not (ZERO < w < fx(1)):
            raise ConfigError(f"weights must lie in (0, 1), got {w}")
    if args.amp <= ZERO or args.d <= ZERO:
        raise ConfigError("--amp and --d must be positive")
    rows = price_curve(args.amp, args.d, weights)
    lines = ["weight,price"] + [f"{w.to_decimal_string(pad=True)},{p.to_decimal_string(pad=True)}" for w, p in rows]
    write_atomic(args.out, "\n".join(lines) + "\n")
    if args.plot:
        svg = line_chart(
            [float(w) for w, _ in rows],
            [("price", [float(p) for _, p in rows])],
            x_label="stablecoin weight",
            title=f"StableSwap price curve, A = {args.amp}",
        )
        write_atomic(args.plot, svg)
    print(f"rows={len(rows)} amp={args.amp} d={args.d}")
    return EXIT_OK


def cmd_list_configs(args: argparse.Namespace) -> int:
    for name in bundled_configs():
        print(name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pidrate", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario config and write its time series")
    p.add_argument("--config", required=True, help="scenario JSON (path or bundled name)")
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--plot", help="optional SVG output path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep-phi", help="find phi giving recovery in the target time per ratio")
    p.add_argument("--config", help="sweep JSON (path or bundled name); flags override it")
    p.add_argument("--ratios", help="start:stop:step, stop inclusive")
    p.add_argument("--target-years", type=_decimal)
    p.add_argument("--held-weight", type=_decimal)
    p.add_argument("--tol", type=_decimal)
    p.add_argument("--dt", type=_decimal, help="timestep in years (default 12h)")
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--plot", help="optional SVG output path")
    p.set_defaults(func=cmd_sweep_phi)

    p = sub.add_parser("pool-curve", help="StableSwap spot price against pool weight")
    p.add_argument("--amp", type=_decimal, default=fx(100))
    p.add_argument("--d", type=_decimal, default=fx(2_000_000))
    p.add_argument("--weights", default="0.05:0.95:0.01", help="start:stop:step, stop inclusive")
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--plot", help="optional SVG output path")
    p.set_defaults(func=cmd_pool_curve)

    p = sub.add_parser("list-configs", help="print the bundled example configs")
    p.set_defaults(func=cmd_list_configs)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    log.debug("kernel backend: %s", kernel.BACKEND)
    try:
        return args.func(args)
    except BracketingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, FixedOverflowError, PoolError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
