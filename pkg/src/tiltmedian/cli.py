"""Command-line front end producing machine-readable diagnostic reports.

Usage::

    tiltmedian median-gap --measure 'gaussian(0,1)' --out report.csv
    tiltmedian choquet-iterate --measure 'perturbed_cosine(0.5)' --steps 8 \
        --out trace.csv
    tiltmedian full-report --measure 'perturbed_quadratic(1)' --format json \
        --out all.json

Commands: median-gap, sign-kernel, deriva, mean-median, symmetry-sweep,
choquet-iterate, lipschitz, full-report.  Options may also be supplied via
``--config file.json``; explicit flags win over file values.  Every run
writes one report file (csv or json, floats serialized with 17 significant
digits so identical runs are byte-identical) and prints a one-line summary
``max|residual| = <value> at t = <value>`` on stdout.

Exit codes: 0 success, 2 configuration problem, 3 measure construction
failure, 4 output write failure.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass
from typing import Any

import numpy as np

from .convolution import ConvolutionSetup, IterationTrace, iterate_fixed_point
from .measures import (
    Gaussian,
    GaussianMixture,
    MeasureError,
    MeasureSpec,
    PerturbedCosine,
    PerturbedQuadratic,
    Tabulated,
    build_measure,
    sample_to_grid,
)
from .medianlaw import DiagnosticReport, lipschitz_bound, scan
from .numerics import DEFAULT_QUADRATURE, QuadratureConfig
from .symmetry import asymmetry_score

__all__ = ["ConfigError", "ExperimentConfig", "main", "parse_measure", "run"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MEASURE = 3
EXIT_IO = 4

SCAN_COMMANDS = {
    "median-gap": "median_gap",
    "sign-kernel": "sign_kernel",
    "deriva": "deriva",
    "mean-median": "mean_median",
}
COMMANDS = tuple(SCAN_COMMANDS) + (
    "symmetry-sweep",
    "choquet-iterate",
    "lipschitz",
    "full-report",
)

_CHOQUET_X_HALFWIDTH = 60.0
_CHOQUET_STEP = 0.01

_CONFIG_KEYS = {
    "measure",
    "t_min",
    "t_max",
    "t_points",
    "out",
    "format",
    "steps",
    "halfwidth",
    "quadrature",
}
_QUADRATURE_KEYS = {"truncation_halfwidth", "rel_tol", "abs_tol", "max_subdivisions"}


class ConfigError(Exception):
    """Malformed command line, config file, or option combination."""


@dataclass(frozen=True)
class ExperimentConfig:
    measure: MeasureSpec
    command: str
    output_path: str
    t_min: float = -6.0
    t_max: float = 6.0
    t_points: int = 49
    output_format: str = "csv"
    steps: int = 8
    halfwidth: float = 2.0
    quadrature: QuadratureConfig = DEFAULT_QUADRATURE

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.output_format!r}")
        if self.command == "full-report" and self.output_format != "json":
            raise ConfigError("full-report emits a single json document; use --format json")
        if self.t_points < 1:
            raise ConfigError("t_points must be at least 1")
        if self.t_points == 1:
            if self.t_min > self.t_max:
                raise ConfigError("t_min must not exceed t_max")
        elif not self.t_min < self.t_max:
            raise ConfigError("t_min must be less than t_max for multi-point grids")
        if self.steps < 1:
            raise ConfigError("steps must be at least 1")
        if not self.halfwidth > 0:
            raise ConfigError("halfwidth must be positive")

    def t_grid(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.t_points)


_MEASURE_RE = re.compile(r"^\s*([a-z_]+)\s*\((.*)\)\s*$")


def parse_measure(text: str) -> MeasureSpec:
    """Parse a measure literal such as ``gaussian(0,1)`` or ``tabulated(g.txt)``."""
    match = _MEASURE_RE.match(text)
    if match is None:
        raise ConfigError(
            f"cannot parse measure {text!r}; expected name(arg, ...) such as gaussian(0,1)"
        )
    name, raw_args = match.group(1), match.group(2)
    if name == "tabulated":
        path = raw_args.strip()
        if not path:
            raise ConfigError("tabulated(...) needs a file path")
        return Tabulated(path)
    try:
        args = [float(part) for part in raw_args.split(",")] if raw_args.strip() else []
    except ValueError as exc:
        raise ConfigError(f"bad numeric argument in measure {text!r}: {exc}") from exc
    factories = {
        "gaussian": (Gaussian, 2),
        "perturbed_cosine": (PerturbedCosine, 1),
        "perturbed_quadratic": (PerturbedQuadratic, 1),
        "gaussian_mixture": (GaussianMixture, 5),
    }
    if name not in factories:
        raise ConfigError(f"unknown measure family {name!r}")
    factory, arity = factories[name]
    if len(args) != arity:
        raise ConfigError(f"{name} takes {arity} arguments, got {len(args)}")
    try:
        return factory(*args)
    except ValueError as exc:
        raise ConfigError(f"invalid measure {text!r}: {exc}") from exc


def _format_float(x: float) -> str:
    return format(float(x), ".17g")


def _to_json(obj: Any) -> str:
    """Serialize with sorted keys and 17-significant-digit floats."""
    if isinstance(obj, dict):
        items = ", ".join(
            f"{json.dumps(str(key))}: {_to_json(value)}" for key, value in sorted(obj.items())
        )
        return "{" + items + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_to_json(item) for item in obj) + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _report_payload(report: DiagnosticReport) -> dict[str, Any]:
    return {
        "name": report.name,
        "t_grid": list(report.t_grid),
        "residuals": list(report.residuals),
        "error_estimates": list(report.error_estimates),
        "summary": {
            "max_abs_residual": report.max_abs_residual,
            "argmax_t": report.argmax_t,
        },
    }


def _report_csv(report: DiagnosticReport) -> str:
    lines = ["t,residual,error_estimate"]
    for t, residual, err in zip(report.t_grid, report.residuals, report.error_estimates):
        lines.append(f"{_format_float(t)},{_format_float(residual)},{_format_float(err)}")
    return "\n".join(lines) + "\n"


def _trace_rows(trace: IterationTrace, grid_x_min: float, grid_step: float) -> list[dict]:
    rows = []
    final = trace.final_iterate
    # reconstruct per-step windows from the constant shrink
    steps_each_side = trace.window_shrink_per_step // 2
    lo = final.window_lo - steps_each_side * (len(trace.oscillations) - 1)
    hi = final.window_hi + steps_each_side * (len(trace.oscillations) - 1)
    for index, osc in enumerate(trace.oscillations):
        rows.append(
            {
                "step": index + 1,
                "oscillation": osc,
                "window_lo": grid_x_min + grid_step * (lo + index * steps_each_side),
                "window_hi": grid_x_min + grid_step * (hi - index * steps_each_side),
            }
        )
    return rows


def _trace_csv(rows: list[dict]) -> str:
    lines = ["step,oscillation,window_lo,window_hi"]
    for row in rows:
        lines.append(
            f"{row['step']},{_format_float(row['oscillation'])},"
            f"{_format_float(row['window_lo'])},{_format_float(row['window_hi'])}"
        )
    return "\n".join(lines) + "\n"


def run(config: ExperimentConfig) -> int:
    """Execute one experiment, write its report, print the summary line."""
    measure = build_measure(config.measure, config.quadrature)
    cfg = config.quadrature

    if config.command in SCAN_COMMANDS:
        report = scan(measure, SCAN_COMMANDS[config.command], config.t_grid(), cfg)
        text = (
            _to_json(_report_payload(report)) + "\n"
            if config.output_format == "json"
            else _report_csv(report)
        )
        summary = (report.max_abs_residual, report.argmax_t)
    elif config.command == "symmetry-sweep":
        ts = [float(t) for t in config.t_grid()]
        scores = [asymmetry_score(measure, t, cfg=cfg).asymmetry_score for t in ts]
        if ts:
            idx = int(np.argmax(np.abs(scores)))
            summary_values = (abs(scores[idx]), ts[idx])
        else:
            summary_values = (0.0, 0.0)
        report = DiagnosticReport(
            name="symmetry",
            t_grid=tuple(ts),
            residuals=tuple(scores),
            error_estimates=tuple(0.0 for _ in ts),
            max_abs_residual=summary_values[0],
            argmax_t=summary_values[1],
        )
        text = (
            _to_json(_report_payload(report)) + "\n"
            if config.output_format == "json"
            else _report_csv(report)
        )
        summary = summary_values
    elif config.command == "full-report":
        payload = {}
        summary = (0.0, 0.0)
        best = -1.0
        for name in sorted(SCAN_COMMANDS.values()):
            report = scan(measure, name, config.t_grid(), cfg)
            payload[name] = _report_payload(report)
            if report.max_abs_residual > best:
                best = report.max_abs_residual
                summary = (report.max_abs_residual, report.argmax_t)
        text = _to_json(payload) + "\n"
    elif config.command == "choquet-iterate":
        points = round(2 * _CHOQUET_X_HALFWIDTH / _CHOQUET_STEP) + 1
        grid = sample_to_grid(measure, -_CHOQUET_X_HALFWIDTH, _CHOQUET_X_HALFWIDTH, points)
        trace = iterate_fixed_point(grid, config.steps, ConvolutionSetup(step=_CHOQUET_STEP))
        rows = _trace_rows(trace, grid.x_min, grid.step)
        if config.output_format == "json":
            text = (
                _to_json(
                    {
                        "trace": rows,
                        "window_shrink_per_step": trace.window_shrink_per_step,
                    }
                )
                + "\n"
            )
        else:
            text = _trace_csv(rows)
        summary = (trace.oscillations[-1], float(config.steps))
    elif config.command == "lipschitz":
        bound = lipschitz_bound(measure, config.halfwidth, cfg)
        payload = {"halfwidth": config.halfwidth, "bound": bound}
        if config.output_format == "json":
            text = _to_json(payload) + "\n"
        else:
            text = (
                "halfwidth,bound\n"
                f"{_format_float(config.halfwidth)},{_format_float(bound)}\n"
            )
        summary = (bound, config.halfwidth)
    else:  # pragma: no cover - guarded by ExperimentConfig
        raise ConfigError(f"unknown command {config.command!r}")

    with open(config.output_path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)
    print(f"max|residual| = {_format_float(summary[0])} at t = {_format_float(summary[1])}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tiltmedian",
        description="Diagnostics for exponential tilting of real probability measures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--measure", help="measure literal, e.g. 'gaussian(0,1)'")
        cmd.add_argument("--t-min", type=float, dest="t_min")
        cmd.add_argument("--t-max", type=float, dest="t_max")
        cmd.add_argument("--t-points", type=int, dest="t_points")
        cmd.add_argument("--out", help="report file path")
        cmd.add_argument("--format", choices=("csv", "json"), dest="format")
        cmd.add_argument("--config", help="json file with default option values")
        if name == "choquet-iterate":
            cmd.add_argument("--steps", type=int)
        if name == "lipschitz":
            cmd.add_argument("--halfwidth", type=float)
    return parser


def _load_config_file(path: str) -> dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a json object")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return data


def _quadrature_from(data: Any) -> QuadratureConfig:
    if not isinstance(data, dict):
        raise ConfigError("quadrature overrides must be a json object")
    unknown = set(data) - _QUADRATURE_KEYS
    if unknown:
        raise ConfigError(f"unknown quadrature keys: {sorted(unknown)}")
    try:
        return QuadratureConfig(**data)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid quadrature overrides: {exc}") from exc


def _assemble_config(args: argparse.Namespace) -> ExperimentConfig:
    file_values: dict[str, Any] = {}
    if args.config is not None:
        file_values = _load_config_file(args.config)

    def pick(flag_value, key, default):
        if flag_value is not None:
            return flag_value
        return file_values.get(key, default)

    measure_text = pick(args.measure, "measure", None)
    if measure_text is None:
        raise ConfigError("a measure is required (--measure or config file)")
    out = pick(args.out, "out", None)
    if out is None:
        raise ConfigError("an output path is required (--out or config file)")
    quadrature = DEFAULT_QUADRATURE
    if "quadrature" in file_values:
        quadrature = _quadrature_from(file_values["quadrature"])

    try:
        return ExperimentConfig(
            measure=parse_measure(str(measure_text)),
            command=args.command,
            output_path=str(out),
            t_min=float(pick(args.t_min, "t_min", -6.0)),
            t_max=float(pick(args.t_max, "t_max", 6.0)),
            t_points=int(pick(args.t_points, "t_points", 49)),
            output_format=str(pick(args.format, "format", "csv")),
            steps=int(pick(getattr(args, "steps", None), "steps", 8)),
            halfwidth=float(pick(getattr(args, "halfwidth", None), "halfwidth", 2.0)),
            quadrature=quadrature,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid option value: {exc}") from exc


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else EXIT_OK
    try:
        config = _assemble_config(args)
        return run(config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MeasureError as exc:
        print(f"error: cannot build measure: {exc}", file=sys.stderr)
        return EXIT_MEASURE
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
