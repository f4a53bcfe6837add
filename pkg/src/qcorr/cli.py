"""Command-line entry point.

Usage::

    qcorr <config-path> [--out DIR] [--svg]

The configuration file selects a scenario; every scenario writes delimited
output (plus an optional SVG sibling per table) into the output directory
and prints the written paths, one per line.  Exit codes: 0 success, 2
configuration error, 3 numerical failure, 4 output I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .analysis import audit, sweep
from .config import ConfigError, RunConfig, load_config
from .correlations import Measure
from .dynamics import (
    DEFAULT_ODE_STEP,
    ExactClosedForm,
    OdeOracle,
    evolve_on_grid,
)
from .report import CsvTable, render_figure, write_csv, write_text


def _m_tag(m: float) -> str:
    return f"m{m:g}"


def _figure_path(csv_path: Path) -> Path:
    return csv_path.with_suffix(".svg")


def _emit_table(
    out_dir: Path,
    stem: str,
    header: list[str],
    columns: list[np.ndarray],
    emit_svg: bool,
    ylabel: str,
    title: str,
) -> list[Path]:
    csv_path = write_csv(out_dir / f"{stem}.csv", CsvTable(header, columns))
    paths = [csv_path]
    if emit_svg:
        curves = dict(zip(header[1:], columns[1:]))
        paths.append(
            render_figure(_figure_path(csv_path), columns[0], curves, ylabel, title)
        )
    return paths


def _run_measure_sweep(config: RunConfig, out_dir: Path, measures, ylabel: str) -> list[Path]:
    """Shared driver for figure1, figure2, and sweep tables."""
    header: list[str] = ["X"]
    columns: list[np.ndarray] = [config.grid]
    for m in config.m_values:
        for measure in measures:
            series = sweep(
                config.state, m, measure, config.backend, config.grid, config.state_label
            )
            header.append(f"{measure.value}_{_m_tag(m)}")
            columns.append(series.values)
    title = f"{ylabel} vs X, {config.state_label}"
    return _emit_table(
        out_dir, config.output_basename, header, columns, config.emit_svg, ylabel, title
    )


def _run_evolve(config: RunConfig, out_dir: Path) -> list[Path]:
    paths: list[Path] = []
    grid = config.grid
    for m in config.m_values:
        evolution = evolve_on_grid(config.state, m, grid, config.backend)
        rate = config.gamma * (1.0 + 2.0 * m)
        with np.errstate(divide="ignore"):
            t = np.where(grid > 0.0, -np.log(np.where(grid > 0.0, grid, 1.0)) / rate, np.inf)
        header = ["X", "t", "a", "b", "c", "d", "w_re", "w_im", "z_re", "z_im", "trace_defect"]
        columns = [
            grid, t,
            evolution.a, evolution.b, evolution.c, evolution.d,
            evolution.w.real, evolution.w.imag,
            evolution.z.real, evolution.z.imag,
            evolution.trace_defect,
        ]
        stem = f"{config.output_basename}_{_m_tag(m)}"
        csv_path = write_csv(out_dir / f"{stem}.csv", CsvTable(header, columns))
        paths.append(csv_path)
        if config.emit_svg:
            curves = {
                "a": evolution.a, "b": evolution.b,
                "c": evolution.c, "d": evolution.d,
            }
            title = f"populations vs X, {config.state_label}, {_m_tag(m)}"
            paths.append(
                render_figure(_figure_path(csv_path), grid, curves, "population", title)
            )
    return paths


def _run_audit(config: RunConfig, out_dir: Path) -> list[Path]:
    divider = "-" * 72
    sections = [
        audit(config.state, m, config.state_label).render_text()
        for m in config.m_values
    ]
    text = f"\n{divider}\n\n".join(sections)
    return [write_text(out_dir / f"{config.output_basename}.txt", text)]


def _run_compare_backends(config: RunConfig, out_dir: Path) -> list[Path]:
    ode = OdeOracle(dt=config.dt if config.dt is not None else DEFAULT_ODE_STEP)
    exact = ExactClosedForm()
    grid = config.grid
    header: list[str] = ["X"]
    columns: list[np.ndarray] = [grid]
    for m in config.m_values:
        ref = evolve_on_grid(config.state, m, grid, exact)
        num = evolve_on_grid(config.state, m, grid, ode)
        deviation = np.maximum.reduce([
            np.abs(ref.a - num.a),
            np.abs(ref.b - num.b),
            np.abs(ref.c - num.c),
            np.abs(ref.d - num.d),
            np.abs(ref.w - num.w),
            np.abs(ref.z - num.z),
        ])
        header.append(f"deviation_{_m_tag(m)}")
        columns.append(deviation)
    title = f"max element deviation exact vs ode, {config.state_label}"
    return _emit_table(
        out_dir, config.output_basename, header, columns, config.emit_svg,
        "max |exact - ode|", title,
    )


def run(config: RunConfig, out_dir) -> list[Path]:
    """Execute one validated configuration; returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if config.scenario == "figure1":
        return _run_measure_sweep(config, out_dir, [Measure.GMOD], "gmod")
    if config.scenario == "figure2":
        return _run_measure_sweep(
            config, out_dir, [Measure.MIN_PAPER, Measure.MIN_GENERAL], "min"
        )
    if config.scenario == "sweep":
        return _run_measure_sweep(config, out_dir, config.measures, "measure value")
    if config.scenario == "evolve":
        return _run_evolve(config, out_dir)
    if config.scenario == "audit":
        return _run_audit(config, out_dir)
    if config.scenario == "compare-backends":
        return _run_compare_backends(config, out_dir)
    raise ConfigError(f"unknown scenario {config.scenario!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcorr",
        description=(
            "Correlation sweeps for two qubits in local thermal reservoirs: "
            "runs the scenario described by a JSON configuration and writes "
            "delimited tables (optionally with SVG figures)."
        ),
    )
    parser.add_argument("config", help="path to a JSON run configuration")
    parser.add_argument(
        "--out", default=".", metavar="DIR",
        help="output directory (created if missing; default: current directory)",
    )
    parser.add_argument(
        "--svg", action="store_true",
        help="also render an SVG figure next to each table",
    )
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.svg:
            config.emit_svg = True
        paths = run(config, args.out)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return 4
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
