"""Figure recipes: what to draw, from which files, into which image.

A recipe names one or more input CSV/JSON products, a figure kind, the
axis labels, and the output image path.  Recipes are plain JSON
documents::

    {
      "kind": "heatmap",
      "inputs": ["runs/map_single_qubit.csv"],
      "output": "figs/map_single_qubit.png",
      "options": {"column": "pg", "qubit": 0}
    }

``xlabel``/``ylabel``/``title`` are optional; each kind supplies
defaults whose units state what is actually plotted.  When a custom
label carries a parenthesized unit it must match the plotted unit
(e.g. the resolution curve converts metres to centimetres, so its
labels must say ``(cm)``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path


KINDS = ("heatmap", "linecut", "waveform", "curve")


class RecipeError(ValueError):
    """A recipe or its referenced data cannot produce a figure."""


@dataclass(frozen=True)
class FigureRecipe:
    """One figure: input products, kind, labels, output image path.

    Parameters
    ----------
    kind : str
        One of ``heatmap`` (population over focal point x amplitude),
        ``linecut`` (population versus focal point at one amplitude),
        ``waveform`` (field and envelope overlay), ``curve``
        (resolution curve or distortion-versus-reflectance summary).
    inputs : tuple of Path
        CSV products, plus an optional ``optimal_*.json`` for linecuts.
    output : Path
        Image file to write (extension picks the format, e.g. ``.png``).
    xlabel, ylabel, title : str
        Axis labels and title; empty strings select per-kind defaults.
    options : dict
        Kind-specific selections: ``column`` (population column,
        default ``pg``), ``qubit`` (row selector, default all qubits
        for linecuts and 0 elsewhere), ``amplitude_ghz`` (linecut
        amplitude, cyclic GHz), ``dpi`` (default 150).
    """

    kind: str
    inputs: tuple[Path, ...]
    output: Path
    xlabel: str = ""
    ylabel: str = ""
    title: str = ""
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise RecipeError(
                f"unknown figure kind {self.kind!r}; expected one of {', '.join(KINDS)}"
            )
        if not self.inputs:
            raise RecipeError("recipe lists no input files")
        object.__setattr__(self, "inputs", tuple(Path(p) for p in self.inputs))
        object.__setattr__(self, "output", Path(self.output))


def load_recipe(path) -> FigureRecipe:
    """Read a recipe JSON file; relative paths resolve next to it."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise RecipeError(f"{path} is not valid JSON: {err}") from err
    if not isinstance(doc, dict):
        raise RecipeError(f"{path}: recipe must be a JSON object")
    known = {"kind", "inputs", "output", "xlabel", "ylabel", "title", "options"}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise RecipeError(f"{path}: unknown recipe keys: {', '.join(unknown)}")
    for key in ("kind", "inputs", "output"):
        if key not in doc:
            raise RecipeError(f"{path}: recipe is missing {key!r}")
    inputs = doc["inputs"]
    if isinstance(inputs, str) or not isinstance(inputs, list):
        raise RecipeError(f"{path}: inputs must be a list of paths")
    base = path.parent
    return FigureRecipe(
        kind=doc["kind"],
        inputs=tuple(_resolve(base, p) for p in inputs),
        output=_resolve(base, doc["output"]),
        xlabel=doc.get("xlabel", ""),
        ylabel=doc.get("ylabel", ""),
        title=doc.get("title", ""),
        options=dict(doc.get("options", {})),
    )


def _resolve(base: Path, p) -> Path:
    p = Path(p)
    return p if p.is_absolute() else base / p
