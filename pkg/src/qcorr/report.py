"""Delimited output and figure rendering.

CSV files are the primary deliverable and are rendered byte-stably: numbers
are formatted with ``format(value, ".12g")`` (plain ``0`` for zero, ``inf``
allowed for the infinite-time row), lines end with a single newline, and the
file carries a trailing newline.  Figures are optional siblings of the CSV
written through the Agg canvas with the SVG hash salt and date metadata
pinned, so repeated runs produce identical bytes there too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


def format_number(value: float) -> str:
    """Shortest stable decimal form: '0' for zero, else 12 significant digits."""
    value = float(value)
    if value == 0.0:
        return "0"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".12g")


@dataclass
class CsvTable:
    """A rectangular table of float columns with a header row."""

    header: list[str]
    columns: list[np.ndarray]

    def __post_init__(self):
        if len(self.header) != len(self.columns):
            raise ValueError(
                f"{len(self.header)} header fields for {len(self.columns)} columns"
            )
        if not self.columns:
            raise ValueError("a table needs at least one column")
        self.columns = [np.asarray(col, dtype=float) for col in self.columns]
        n = self.columns[0].size
        for name, col in zip(self.header, self.columns):
            if col.ndim != 1 or col.size != n:
                raise ValueError(f'column "{name}" does not match length {n}')

    def render(self) -> str:
        lines = [",".join(self.header)]
        rows = zip(*self.columns)
        for row in rows:
            lines.append(",".join(format_number(v) for v in row))
        return "\n".join(lines) + "\n"


def write_csv(path, table: CsvTable) -> Path:
    """Write a table with pinned newline bytes; returns the path."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(table.render())
    return path


def write_text(path, text: str) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def render_figure(path, x, curves: dict[str, np.ndarray], ylabel: str, title: str) -> Path:
    """Render one set of curves over X to an SVG file, deterministically.

    matplotlib is imported lazily so CSV-only runs never pay for it.
    """
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "qcorr"}):
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        try:
            for label, values in curves.items():
                ax.plot(np.asarray(x, dtype=float), np.asarray(values, dtype=float),
                        label=label, linewidth=1.4)
            ax.set_xlabel("X")
            ax.set_ylabel(ylabel)
            ax.set_title(title)
            ax.set_xlim(float(np.min(x)), float(np.max(x)))
            ax.grid(True, alpha=0.3)
            ax.legend(loc="best")
            fig.savefig(path, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
    return Path(path)
