"""Command-line entry point: ``recoherence <subcommand> [options]``.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import logging
import math
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .channel import Channel, survival_probability
from .errors import ContractError, QuadratureError, ResolutionError
from .measurement import (
    MeasurementScenario,
    recovered_probability_closed,
    recovered_probability_quadrature,
)
from .montecarlo import (
    INTEGRATION_TIME,
    PAIR_RATE,
    CountingConfig,
    NoMeasurementScenario,
    simulate_counts,
)
from .quadrature import quadrature
from .scans import Physics, ScanSpec, oscillation_period, run_scan, tilt_grid
from .states import make_pure
from .validate import run_checks

log = logging.getLogger("recoherence")

OUTPUT_DIR_ENV = "RECOHERENCE_OUTPUT_DIR"
EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
# keys that steer I/O rather than the computation; not replayed from manifests
_IO_KEYS = {"command", "config", "out", "verbose", "workers"}


class UsageError(Exception):
    pass


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".12g")


def _round12(v):
    if isinstance(v, float) and math.isfinite(v):
        return float(format(v, ".12g"))
    return v


def positive_float(text):
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text!r}")
    return v


def nonneg_float(text):
    v = float(text)
    if not (v >= 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be a non-negative number, got {text!r}")
    return v


def unit_float(text):
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {text!r}")
    return v


def positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text!r}")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _common(p):
    g = p.add_argument_group("physics and output")
    g.add_argument("--lambda0-um", type=positive_float, default=0.78, help="wavelength in um")
    g.add_argument(
        "--sigma-hz",
        type=positive_float,
        default=6.9e12,
        help="frequency spread in Hz (x 2 pi internally)",
    )
    g.add_argument("--delta-n", type=positive_float, default=0.01, help="birefringence n_o - n_e")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help=f"output file (default: stdout or ${OUTPUT_DIR_ENV})")
    g.add_argument("--format", choices=("csv", "structured"), default="csv")
    g.add_argument("--config", help="JSON file of flag values, or a run manifest to replay")
    g.add_argument("--workers", type=positive_int, default=1, help="threads for Monte Carlo")
    g.add_argument("-v", "--verbose", action="store_true")


def _mc_flags(p):
    p.add_argument("--mc", action="store_true", help="add Monte Carlo columns")
    p.add_argument("--pair-rate", type=positive_float, default=PAIR_RATE, help="coincidences/s")
    p.add_argument("--integration-time", type=positive_float, default=INTEGRATION_TIME, help="s")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="recoherence",
        description="Coherence recovery of a dephased polarization qubit by measurement.",
        epilog=f"Without --out, output goes to stdout unless ${OUTPUT_DIR_ENV} names a directory, "
        "in which case it is written there as <command>.csv or <command>.json. "
        "Exit codes: 0 ok, 1 validation failure, 2 usage error, 3 numeric failure.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("landscape", help="asymptotic fidelity vs |beta|^2")
    _common(p)
    p.add_argument("--b-min", type=unit_float, default=0.0)
    p.add_argument("--b-max", type=unit_float, default=1.0)
    p.add_argument("--b-points", type=positive_int, default=101)

    p = sub.add_parser("visibility-scan", help="visibility vs total retardation")
    _common(p)
    p.add_argument("--x-min", type=nonneg_float, default=0.0)
    p.add_argument("--x-max", type=nonneg_float, default=74.0)
    p.add_argument("--x-step", type=positive_float, default=2.0)
    _mc_flags(p)

    p = sub.add_parser("fidelity-scan", help="detection probability with insertion at --l1")
    _common(p)
    p.add_argument("--l1", type=nonneg_float, default=74.0, help="insertion retardation")
    p.add_argument("--x-max", type=nonneg_float, default=148.0)
    p.add_argument("--x-step", type=positive_float, default=1.0)
    p.add_argument("--inset", action="store_true", help="fine grid around 2*l1 instead")
    p.add_argument("--span", type=nonneg_float, default=1.0, help="inset width in lambda0")
    p.add_argument("--points", type=positive_int, default=201)
    _mc_flags(p)

    p = sub.add_parser("tilt-scan", help="sub-wavelength oscillation around --center")
    _common(p)
    p.add_argument("--center", type=nonneg_float, default=148.0)
    p.add_argument("--span", type=nonneg_float, default=1.0)
    p.add_argument("--points", type=positive_int, default=201)
    p.add_argument("--l1", type=nonneg_float, default=74.0)
    _mc_flags(p)

    p = sub.add_parser("montecarlo", help="simulate one counting run and compare with theory")
    _common(p)
    p.add_argument("--b", type=unit_float, default=0.5, help="|beta|^2 of the prepared state")
    p.add_argument("--phi", type=float, default=0.0, help="relative phase (rad)")
    p.add_argument("--x1", type=nonneg_float, default=74.0, help="retardation before measurement")
    p.add_argument("--x2", type=nonneg_float, default=74.0, help="retardation after measurement")
    p.add_argument("--no-measurement", action="store_true", help="single segment of x1 + x2")
    p.add_argument("--pair-rate", type=positive_float, default=PAIR_RATE)
    p.add_argument("--integration-time", type=positive_float, default=INTEGRATION_TIME)
    p.add_argument("--tol", type=positive_float, default=1e-10, help="quadrature tolerance")

    p = sub.add_parser("validate", help="run the invariant and oracle-agreement checks")
    _common(p)
    p.add_argument("--quick", action="store_true", help="skip Monte Carlo checks")
    p.add_argument("--mc-seeds", type=positive_int, default=3, help="number of Monte Carlo seeds")
    p.add_argument(
        "--sigma-angular", action="store_true", help="read --sigma-hz as rad/s (diagnostic)"
    )
    return parser


def _load_config(path, command, subparser):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if "parameters" in data:  # a run manifest
        if data.get("command") != command:
            raise UsageError(f"manifest is for {data.get('command')!r}, not {command!r}")
        data = data["parameters"]
    if not isinstance(data, dict):
        raise UsageError("config must be a flat JSON object")
    actions = {a.dest: a for a in subparser._actions}
    out = {}
    for key, value in data.items():
        dest = key.replace("-", "_")
        if dest in _IO_KEYS:
            continue
        if dest not in actions or dest == "help":
            raise UsageError(f"unknown config key {key!r}")
        action = actions[dest]
        if action.type is not None and value is not None:
            try:
                value = action.type(str(value))
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"bad config value for {key!r}: {exc}") from exc
        if action.choices is not None and value not in action.choices:
            raise UsageError(f"bad config value for {key!r}: {value!r}")
        out[dest] = value
    return out


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        sub = parser._subparsers._group_actions[0].choices[args.command]
        sub.set_defaults(**_load_config(args.config, args.command, sub))
        args = parser.parse_args(argv)
    return args


def physics_from(args) -> Physics:
    return Physics(
        lambda0=args.lambda0_um * 1e-6,
        sigma_hz=args.sigma_hz,
        delta_n=args.delta_n,
        sigma_angular=getattr(args, "sigma_angular", False),
    )


def _arange(lo, hi, step):
    if hi < lo:
        raise UsageError("upper grid bound is below the lower bound")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


class Table:
    def __init__(self, columns, rows, meta=None):
        self.columns = columns
        self.rows = rows
        self.meta = meta or {}

    def render(self, kind: str) -> str:
        if kind == "csv":
            buf = io.StringIO()
            buf.write(",".join(self.columns) + "\n")
            for r in self.rows:
                buf.write(",".join(fmt(v) for v in r) + "\n")
            return buf.getvalue()
        doc = {
            "columns": self.columns,
            "rows": [[_round12(v) for v in r] for r in self.rows],
            "meta": {k: _round12(v) for k, v in self.meta.items()},
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _scan_table(spec: ScanSpec, columns, pick):
    rows = run_scan(spec)
    if spec.include_montecarlo:
        columns = columns + ["mc_p", "mc_err"]
        return Table(columns, [pick(r) + [r.mc_p_hat, r.mc_std_err] for r in rows])
    return Table(columns, [pick(r) for r in rows])


def cmd_landscape(args):
    if args.b_max < args.b_min:
        raise UsageError("--b-max is below --b-min")
    n = 1 if args.b_max == args.b_min else args.b_points
    grid = np.linspace(args.b_min, args.b_max, n)
    spec = ScanSpec("landscape", grid, physics_from(args))
    return _scan_table(
        spec, ["b", "p_without", "p_with"], lambda r: [r.x, r.p_no_meas, r.p_with_meas]
    )


def _mc_spec(kind, grid, args, **extra):
    return ScanSpec(
        kind,
        grid,
        physics_from(args),
        include_montecarlo=args.mc,
        seed=args.seed,
        pair_rate=args.pair_rate,
        integration_time=args.integration_time,
        workers=args.workers,
        **extra,
    )


def cmd_visibility_scan(args):
    spec = _mc_spec("visibility", _arange(args.x_min, args.x_max, args.x_step), args)
    return _scan_table(
        spec, ["x_lambda0", "v_without", "v_with"], lambda r: [r.x, r.v_no_meas, r.v_with_meas]
    )


def _tilt_table(args, center, l1):
    spec = _mc_spec("tilt", tilt_grid(center, args.span, args.points), args, l1=l1)
    table = _scan_table(
        spec,
        ["x_lambda0", "p_without", "p_with", "v_with"],
        lambda r: [r.x, r.p_no_meas, r.p_with_meas, r.v_with_meas],
    )
    if args.span > 0:
        try:
            period = oscillation_period(center, 2.0, l1, spec.physics)
        except ValueError:
            period = None
        if period is not None:
            table.meta["period_lambda0"] = period
            log.info("oscillation period: %s lambda0", fmt(period))
    return table


def cmd_fidelity_scan(args):
    if args.inset:
        return _tilt_table(args, 2.0 * args.l1, args.l1)
    grid = _arange(0.0, args.x_max, args.x_step)
    spec = _mc_spec("fidelity_trajectory", grid, args, l1=args.l1)
    return _scan_table(
        spec,
        ["x_lambda0", "segment", "p_without", "p_with"],
        lambda r: [r.x, r.segment, r.p_no_meas, r.p_with_meas],
    )


def cmd_tilt_scan(args):
    return _tilt_table(args, args.center, args.l1)


def cmd_montecarlo(args):
    ph = physics_from(args)
    s = ph.spectrum()
    psi = make_pure(args.b, args.phi)
    g1, g2 = ph.gamma(args.x1), ph.gamma(args.x2)
    if args.no_measurement:
        g = g1 + g2
        sc = NoMeasurementScenario(psi, s, g)
        p_closed = survival_probability(psi, s, Channel(g))
        pa, pb = 1.0 - args.b, args.b
        overlap = quadrature(lambda w: np.cos(g * w), s, args.tol)
        p_quad = pa * pa + pb * pb + 2.0 * pa * pb * overlap
    else:
        sc = MeasurementScenario(psi, s, g1, g2)
        p_closed = recovered_probability_closed(sc)
        p_quad = recovered_probability_quadrature(sc, args.tol)
    cfg = CountingConfig(sc, args.pair_rate, args.integration_time, args.seed)
    rec = simulate_counts(cfg, workers=args.workers)
    z = (rec.p_hat - p_closed) / rec.std_err if rec.std_err > 0 else 0.0
    return Table(
        ["n_total", "n_detected", "p_hat", "std_err", "p_closed", "p_quadrature", "z_score"],
        [[rec.n_total, rec.n_detected, rec.p_hat, rec.std_err, p_closed, p_quad, z]],
    )


def cmd_validate(args):
    seeds = range(args.seed, args.seed + args.mc_seeds)
    checks = run_checks(physics_from(args), quick=args.quick, seeds=seeds, workers=args.workers)
    table = Table(
        ["check", "tolerance", "observed", "status", "detail"],
        [
            [c.name, c.tolerance, c.observed, "pass" if c.passed else "FAIL", c.detail]
            for c in checks
        ],
    )
    table.meta["passed"] = all(c.passed for c in checks)
    for c in checks:
        if not c.passed:
            log.error("check failed: %s (observed %s, tol %s)", c.name, c.observed, c.tolerance)
    return table


COMMANDS = {
    "landscape": cmd_landscape,
    "visibility-scan": cmd_visibility_scan,
    "fidelity-scan": cmd_fidelity_scan,
    "tilt-scan": cmd_tilt_scan,
    "montecarlo": cmd_montecarlo,
    "validate": cmd_validate,
}


def _resolved_parameters(args):
    return {k: v for k, v in sorted(vars(args).items()) if k not in _IO_KEYS}


def write_manifest(args, out_path: Path, text: str):
    manifest = {
        "command": args.command,
        "parameters": _resolved_parameters(args),
        "seed": args.seed,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "output": out_path.name,
        "sha256": hashlib.sha256(text.encode()).hexdigest(),
    }
    path = out_path.with_name(out_path.name + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _output_path(args):
    if args.out:
        return Path(args.out)
    env = os.environ.get(OUTPUT_DIR_ENV)
    if env:
        ext = "csv" if args.format == "csv" else "json"
        return Path(env) / f"{args.command}.{ext}"
    return None


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    level = logging.INFO if args.verbose else logging.WARNING
    logging.basicConfig(level=level, format="%(message)s")
    try:
        table = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"recoherence {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, ResolutionError, ArithmeticError) as exc:
        print(f"recoherence {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, ContractError) as exc:
        print(f"recoherence {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    text = table.render(args.format)
    out = _output_path(args)
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        write_manifest(args, out, text)
        log.info("wrote %s", out)
    if args.command == "validate" and not table.meta["passed"]:
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
