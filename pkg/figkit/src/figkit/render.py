"""Render sweep CSVs as heatmaps and causality traces as line plots.

Strictly a consumer of the simulator's CSV artifacts: input files are
never modified, plots show exactly the computed grid (missing points stay
gaps, nothing is interpolated or smoothed), and output bytes are
deterministic for a fixed input and style version.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RECORD_NUMERIC = ("sweep_value", "time_value", "e_n", "mi", "d12", "d21", "purity", "drift")
MEASURE_COLUMNS = ("e_n", "mi", "d12", "d21", "purity", "drift")
TRACE_COLUMNS = ("time_value", "t_over_tc", "p_vacuum", "p_squeezed")

STYLE_VERSION = "figkit-1"
_FIGSIZE = (6.4, 4.8)
_DPI = 130


@dataclass(frozen=True)
class FigureSpec:
    input_csv: str
    output_image: str
    measure: str = "e_n"
    xlabel: str | None = None
    ylabel: str | None = None
    title: str | None = None
    bounds: tuple[float, float] | None = None  # None = auto colour scale


def _read_rows(path: str, required: tuple[str, ...]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in required:
            if column not in header:
                raise ValueError(f"{path}: missing column {column!r}")
        rows = []
        for index, raw in enumerate(reader, start=2):
            row = {}
            for column in required:
                value = raw.get(column)
                if value is None:
                    raise ValueError(f"{path}: row {index} is missing {column!r}")
                try:
                    row[column] = float(value)
                except ValueError as exc:
                    raise ValueError(
                        f"{path}: row {index}, column {column!r}: not a number: {value!r}"
                    ) from exc
            rows.append(row)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return rows


def load_grid(path: str, measure: str):
    """Pivot sweep records into a (sweep x time) matrix; gaps become NaN."""
    if measure not in MEASURE_COLUMNS:
        raise ValueError(
            f"unknown measure column {measure!r}; expected one of {MEASURE_COLUMNS}"
        )
    rows = _read_rows(path, ("sweep_value", "time_value", measure))
    sweeps = sorted({row["sweep_value"] for row in rows})
    times = sorted({row["time_value"] for row in rows})
    sweep_index = {value: i for i, value in enumerate(sweeps)}
    time_index = {value: i for i, value in enumerate(times)}
    grid = np.full((len(sweeps), len(times)), np.nan)
    for row in rows:
        grid[sweep_index[row["sweep_value"]], time_index[row["time_value"]]] = row[measure]
    return np.asarray(sweeps), np.asarray(times), grid


def _save(fig, path: str) -> None:
    fig.savefig(path, dpi=_DPI, metadata={"Software": STYLE_VERSION})
    plt.close(fig)


def render_heatmap(spec: FigureSpec) -> str:
    """One raster image of measure(sweep, time); returns the output path."""
    sweeps, times, grid = load_grid(spec.input_csv, spec.measure)
    masked = np.ma.masked_invalid(grid)
    if spec.bounds is not None:
        vmin, vmax = spec.bounds
    else:
        finite = grid[np.isfinite(grid)]
        vmin = min(0.0, float(finite.min()))
        vmax = float(finite.max())
        if vmax <= vmin:
            vmax = vmin + 1.0
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    mesh = ax.pcolormesh(
        times, sweeps, masked, shading="nearest", vmin=vmin, vmax=vmax, cmap="viridis"
    )
    fig.colorbar(mesh, ax=ax, label=spec.measure)
    ax.set_xlabel(spec.xlabel or "time")
    ax.set_ylabel(spec.ylabel or "sweep value")
    if spec.title:
        ax.set_title(spec.title)
    _save(fig, spec.output_image)
    return spec.output_image


def render_causality(spec: FigureSpec) -> str:
    """Two-curve excitation plot with a marker at causal contact."""
    rows = _read_rows(spec.input_csv, TRACE_COLUMNS)
    x = np.array([row["t_over_tc"] for row in rows])
    p_vacuum = np.array([row["p_vacuum"] for row in rows])
    p_squeezed = np.array([row["p_squeezed"] for row in rows])
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.plot(x, p_vacuum, linestyle="--", color="tab:blue", label="detector 2 in vacuum")
    ax.plot(x, p_squeezed, color="tab:red", label="detector 2 squeezed")
    ax.axvline(1.0, color="black", linewidth=0.8)
    ax.set_xlabel(spec.xlabel or "t / t_c")
    ax.set_ylabel(spec.ylabel or "excitation probability of detector 1")
    if spec.title:
        ax.set_title(spec.title)
    ax.legend()
    _save(fig, spec.output_image)
    return spec.output_image
