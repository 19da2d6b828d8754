"""Render figure recipes from wgfocus CSV/JSON products.

Readers parse only the documented file schemas and fail with an error
naming the offending column; nothing is written until the inputs have
been read and validated, so a bad input never leaves an image behind.
Population heatmaps always use the fixed color scale [0, 1].

File schemas consumed here (all long-format CSV with a header row):

- population map (``map_*.csv``, ``refl_*_<k>.csv``):
  ``d_f_m,amplitude,sigma_f_m,qubit,pg,pe,pf,leak`` — rows iterate
  focal points, then amplitudes, then qubits; ``amplitude`` is angular
  (rad/s) and is displayed as cyclic GHz.
- waveform envelope (``*_envelope.csv``, ``compress_*_{entrance,focal}.csv``):
  ``t_ns,field,envelope``.
- resolution curve (``resolution_*.csv``): ``sigma_f_m,sigma_q_m``,
  displayed with both axes in cm.
- reflection distortion (``distortion_*.csv``):
  ``reflectance,qubit,distortion_l2``.
- amplitude optima (``optimal_*.json``): object with a ``qubits`` list
  of per-qubit records carrying ``qubit`` and ``amplitude_rad_per_s``
  (used to place linecuts).
"""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .recipes import FigureRecipe, RecipeError

TWO_PI = 2.0 * math.pi

#: population columns a map CSV carries, with their display names
POPULATION_COLUMNS = {
    "pg": "P(g)",
    "pe": "P(e)",
    "pf": "P(f)",
    "leak": "P(n >= 3)",
}

_FIGSIZE = (6.4, 4.8)
_UNIT_RE = re.compile(r"\(([^()]*)\)\s*$")


@dataclass(frozen=True)
class RenderResult:
    """What was drawn: output path, pixel size, and axes metadata."""

    path: Path
    width: int
    height: int
    xlabel: str
    ylabel: str
    title: str
    xlim: tuple[float, float]
    ylim: tuple[float, float]
    color_limits: tuple[float, float] | None = None


def render(recipe: FigureRecipe) -> RenderResult:
    """Draw one recipe and write its image file.

    Returns the output path together with the image dimensions and the
    axes metadata (labels, limits, color scale), which are a pure
    function of the input data.  Raises RecipeError before any file is
    written if an input is missing a column, empty, or malformed.
    """
    fig = Figure(figsize=_FIGSIZE, constrained_layout=True)
    ax = fig.add_subplot()
    draw = {
        "heatmap": _draw_heatmap,
        "linecut": _draw_linecut,
        "waveform": _draw_waveform,
        "curve": _draw_curve,
    }[recipe.kind]
    color_limits = draw(ax, recipe)
    if recipe.title:
        ax.set_title(recipe.title)

    FigureCanvasAgg(fig)
    dpi = float(recipe.options.get("dpi", 150))
    recipe.output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(recipe.output, dpi=dpi)
    width_in, height_in = fig.get_size_inches()
    return RenderResult(
        path=recipe.output,
        width=int(round(width_in * dpi)),
        height=int(round(height_in * dpi)),
        xlabel=ax.get_xlabel(),
        ylabel=ax.get_ylabel(),
        title=ax.get_title(),
        xlim=tuple(float(v) for v in ax.get_xlim()),
        ylim=tuple(float(v) for v in ax.get_ylim()),
        color_limits=color_limits,
    )


# ---------------------------------------------------------------------------
# figure kinds


def _draw_heatmap(ax, recipe: FigureRecipe) -> tuple[float, float]:
    """Population over (focal point, amplitude), color scale fixed to [0, 1]."""
    if len(recipe.inputs) != 1:
        raise RecipeError("heatmap takes exactly one map CSV")
    focal, amps, pops = _read_map(recipe.inputs[0])
    column = _population_column(recipe, recipe.inputs[0])
    qubit = int(recipe.options.get("qubit", 0))
    n_qubits = pops[column].shape[2]
    if not 0 <= qubit < n_qubits:
        raise RecipeError(
            f"{recipe.inputs[0]} holds qubits 0..{n_qubits - 1}, not {qubit}"
        )
    data = np.clip(pops[column][:, :, qubit], 0.0, 1.0)
    amps_ghz = amps / (TWO_PI * 1e9)
    mesh = ax.pcolormesh(
        focal,
        amps_ghz,
        data.T,
        shading="nearest",
        cmap="viridis",
        vmin=0.0,
        vmax=1.0,
        rasterized=True,
    )
    if _log_spaced(amps_ghz):
        ax.set_yscale("log")
    ax.figure.colorbar(mesh, ax=ax, label=POPULATION_COLUMNS[column])
    ax.set_xlabel(_label(recipe.xlabel, "focal point d_f (m)", "m", "x"))
    ax.set_ylabel(_label(recipe.ylabel, "pulse amplitude a/2pi (GHz)", "GHz", "y"))
    return (0.0, 1.0)


def _draw_linecut(ax, recipe: FigureRecipe) -> None:
    """Population versus focal point at one drive amplitude."""
    csv_paths = [p for p in recipe.inputs if p.suffix != ".json"]
    json_paths = [p for p in recipe.inputs if p.suffix == ".json"]
    if len(csv_paths) != 1 or len(json_paths) > 1:
        raise RecipeError("linecut takes one map CSV plus at most one optima JSON")
    focal, amps, pops = _read_map(csv_paths[0])
    column = _population_column(recipe, csv_paths[0])
    n_qubits = pops[column].shape[2]

    if "amplitude_ghz" in recipe.options:
        target = float(recipe.options["amplitude_ghz"]) * TWO_PI * 1e9
    elif json_paths:
        target = _read_optimum(json_paths[0], int(recipe.options.get("qubit", 0)))
    else:
        target = amps[amps.size // 2]
    j = int(np.argmin(np.abs(amps - target)))

    qubits = (
        [int(recipe.options["qubit"])]
        if "qubit" in recipe.options
        else list(range(n_qubits))
    )
    for q in qubits:
        if not 0 <= q < n_qubits:
            raise RecipeError(f"{csv_paths[0]} holds qubits 0..{n_qubits - 1}, not {q}")
        ax.plot(focal, pops[column][:, j, q], label=f"qubit {q}")
    if len(qubits) > 1:
        ax.legend()
    ax.set_ylim(0.0, 1.02)
    ax.set_xlabel(_label(recipe.xlabel, "focal point d_f (m)", "m", "x"))
    ax.set_ylabel(_label(recipe.ylabel, POPULATION_COLUMNS[column], None, "y"))
    if not recipe.title:
        ax.set_title(f"a/2pi = {amps[j] / (TWO_PI * 1e9):.3f} GHz")
    return None


def _draw_waveform(ax, recipe: FigureRecipe) -> None:
    """Field and envelope overlay, one pair of traces per input CSV."""
    for path in recipe.inputs:
        table = _read_csv(path)
        _require(table, path, "t_ns", "field", "envelope")
        (line,) = ax.plot(table["t_ns"], table["field"], linewidth=0.5, alpha=0.5)
        ax.plot(
            table["t_ns"],
            table["envelope"],
            linewidth=1.5,
            color=line.get_color(),
            label=path.stem,
        )
    if len(recipe.inputs) > 1:
        ax.legend()
    ax.set_xlabel(_label(recipe.xlabel, "time (ns)", "ns", "x"))
    ax.set_ylabel(_label(recipe.ylabel, "field (arb. units)", None, "y"))
    return None


def _draw_curve(ax, recipe: FigureRecipe) -> None:
    """Summary curve: resolution (sigma_q vs sigma_f) or distortion."""
    tables = [(_read_csv(p), p) for p in recipe.inputs]
    schemas = {_curve_schema(t, p) for t, p in tables}
    if len(schemas) != 1:
        raise RecipeError("curve inputs mix resolution and distortion schemas")
    schema = schemas.pop()
    many = len(tables) > 1
    if schema == "resolution":
        for table, path in tables:
            ax.plot(
                100.0 * table["sigma_f_m"],
                100.0 * table["sigma_q_m"],
                marker="o",
                label=path.stem if many else None,
            )
        ax.set_xlabel(_label(recipe.xlabel, "pulse spot size sigma_f (cm)", "cm", "x"))
        ax.set_ylabel(
            _label(recipe.ylabel, "excitation spot size sigma_q (cm)", "cm", "y")
        )
        if many:
            ax.legend()
    else:
        for table, path in tables:
            qubits = np.unique(table["qubit"].astype(int))
            for q in qubits:
                mask = table["qubit"].astype(int) == q
                name = f"{path.stem} qubit {q}" if many else f"qubit {q}"
                ax.plot(
                    table["reflectance"][mask],
                    table["distortion_l2"][mask],
                    marker="o",
                    label=name,
                )
        ax.legend()
        ax.set_xlabel(_label(recipe.xlabel, "power reflectance |r|^2", None, "x"))
        ax.set_ylabel(_label(recipe.ylabel, "lineshape distortion", None, "y"))
    return None


def _curve_schema(table: dict, path: Path) -> str:
    if {"sigma_f_m", "sigma_q_m"} <= set(table):
        return "resolution"
    if {"reflectance", "qubit", "distortion_l2"} <= set(table):
        return "distortion"
    raise RecipeError(
        f"{path} matches neither curve schema: expected columns "
        "sigma_f_m,sigma_q_m or reflectance,qubit,distortion_l2 "
        f"(found {','.join(table)})"
    )


# ---------------------------------------------------------------------------
# readers


def _read_csv(path: Path) -> dict[str, np.ndarray]:
    """Header-keyed float columns; errors name the file and the problem."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise RecipeError(f"{path} is empty") from None
            rows = list(reader)
    except OSError as err:
        raise RecipeError(f"cannot read {path}: {err}") from err
    if not rows:
        raise RecipeError(f"{path} has a header but no data rows")
    width = len(header)
    if any(len(row) != width for row in rows):
        raise RecipeError(f"{path} has rows of uneven length")
    table = {}
    cells = np.asarray(rows, dtype=object)
    for i, name in enumerate(header):
        try:
            table[name] = cells[:, i].astype(float)
        except ValueError as err:
            raise RecipeError(
                f"column {name!r} in {path} has non-numeric entries"
            ) from err
    return table


def _require(table: dict, path: Path, *columns: str) -> None:
    missing = [c for c in columns if c not in table]
    if missing:
        raise RecipeError(
            f"{path} is missing column(s) {', '.join(repr(c) for c in missing)} "
            f"(found {','.join(table)})"
        )


def _read_map(path: Path) -> tuple[np.ndarray, np.ndarray, dict[str, np.ndarray]]:
    """Pivot a long-format population map into (focal, amplitude, qubit) arrays."""
    table = _read_csv(path)
    _require(table, path, "d_f_m", "amplitude", "qubit", *POPULATION_COLUMNS)
    focal = np.unique(table["d_f_m"])
    amps = np.unique(table["amplitude"])
    n_qubits = int(table["qubit"].max()) + 1
    shape = (focal.size, amps.size, n_qubits)
    if table["qubit"].size != focal.size * amps.size * n_qubits:
        raise RecipeError(
            f"{path} rows do not form a complete focal x amplitude x qubit grid"
        )
    ok = (
        np.array_equal(table["d_f_m"].reshape(shape), np.broadcast_to(focal[:, None, None], shape))
        and np.array_equal(table["amplitude"].reshape(shape), np.broadcast_to(amps[None, :, None], shape))
        and np.array_equal(table["qubit"].reshape(shape), np.broadcast_to(np.arange(n_qubits)[None, None, :], shape))
    )
    if not ok:
        raise RecipeError(
            f"{path} rows are not ordered focal point, then amplitude, then qubit"
        )
    pops = {name: table[name].reshape(shape) for name in POPULATION_COLUMNS}
    return focal, amps, pops


def _read_optimum(path: Path, qubit: int) -> float:
    """Angular drive amplitude for one qubit from an optimal_*.json file."""
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as err:
        raise RecipeError(f"cannot read {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise RecipeError(f"{path} is not valid JSON: {err}") from err
    if isinstance(doc, dict) and isinstance(doc.get("qubits"), list):
        entries = doc["qubits"]
    elif isinstance(doc, list):
        entries = doc
    else:
        raise RecipeError(f"{path} has no 'qubits' list of optimum records")
    for entry in entries:
        if isinstance(entry, dict) and entry.get("qubit") == qubit:
            try:
                return float(entry["amplitude_rad_per_s"])
            except (KeyError, TypeError, ValueError) as err:
                raise RecipeError(
                    f"{path} entry for qubit {qubit} has no numeric "
                    "'amplitude_rad_per_s'"
                ) from err
    raise RecipeError(f"{path} has no entry for qubit {qubit}")


# ---------------------------------------------------------------------------
# helpers


def _population_column(recipe: FigureRecipe, path: Path) -> str:
    column = recipe.options.get("column", "pg")
    if column not in POPULATION_COLUMNS:
        raise RecipeError(
            f"unknown population column {column!r} for {path}; expected one of "
            f"{', '.join(POPULATION_COLUMNS)}"
        )
    return column


def _label(custom: str, default: str, plotted_unit: str | None, axis: str) -> str:
    """Use the default label, or validate a custom label's stated unit."""
    if not custom:
        return default
    match = _UNIT_RE.search(custom)
    if match and plotted_unit is not None and match.group(1) != plotted_unit:
        raise RecipeError(
            f"{axis} label states unit ({match.group(1)}) but the plotted "
            f"quantity is in ({plotted_unit})"
        )
    return custom


def _log_spaced(values: np.ndarray) -> bool:
    """True for grids with constant ratio but not constant difference."""
    if values.size < 3 or np.any(values <= 0.0):
        return False
    ratios = np.diff(np.log(values))
    diffs = np.diff(values)
    return bool(
        np.allclose(ratios, ratios[0], rtol=1e-6, atol=0.0)
        and not np.allclose(diffs, diffs[0], rtol=1e-6, atol=0.0)
    )
