"""Figure definitions and CSV-bundle loading.

This package is decoupled from the simulation code: it consumes only the
CSV files (with their '#'-prefixed JSON manifest line), the JSON manifests
and the fit-result JSON records that the quenchlab CLI writes.  Each figure
id declares which files it wants and which columns they must carry; schema
violations are reported with the offending column list rather than half
rendering.
"""

from __future__ import annotations

import glob
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FIGURE_IDS = (
    "fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b", "fig5",
)


class SchemaError(ValueError):
    """A CSV does not carry the columns (or manifest header) a figure needs."""


@dataclass(frozen=True)
class DataFile:
    """One parsed CSV: manifest header, column table, and source label."""

    path: Path
    header: dict
    columns: dict

    def series(self, name: str) -> np.ndarray:
        return self.columns[name]

    @property
    def label_params(self) -> dict:
        """tau/xi values recovered from the file name for legend labels."""
        out = {}
        for key in ("tau", "xi"):
            m = re.search(rf"{key}([0-9.e+-]+?)(?=_|\.csv$)", self.path.name)
            if m:
                try:
                    out[key] = float(m.group(1).rstrip("."))
                except ValueError:
                    pass
        return out


def read_csv(path: Path) -> DataFile:
    """Parse a quenchlab CSV; requires the manifest comment line."""
    path = Path(path)
    with open(path) as fh:
        first = fh.readline().strip()
        if not first.startswith("#"):
            raise SchemaError(f"{path.name}: missing manifest header line")
        try:
            header = json.loads(first[1:].strip())
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path.name}: manifest line is not JSON: {exc}") from exc
        names = fh.readline().strip().split(",")
        rows = [line for line in fh if line.strip()]
    if rows:
        data = np.array([[float(v) for v in line.split(",")] for line in rows])
    else:
        data = np.zeros((0, len(names)))
    if data.size and data.shape[1] != len(names):
        raise SchemaError(f"{path.name}: row width does not match header")
    columns = {name: data[:, i] for i, name in enumerate(names)}
    return DataFile(path=path, header=header, columns=columns)


def require_columns(data: DataFile, needed: tuple[str, ...]):
    missing = [c for c in needed if c not in data.columns]
    if missing:
        raise SchemaError(
            f"{data.path.name}: missing column(s) {missing}; "
            f"has {sorted(data.columns)}"
        )


@dataclass(frozen=True)
class FigureSpec:
    """What to render: figure id, input files, output path, style options."""

    figure_id: str
    inputs: tuple[Path, ...]
    output: Path
    fits: tuple[Path, ...] = ()
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise ValueError(f"unknown figure id {self.figure_id!r}; know {FIGURE_IDS}")
        for p in self.inputs:
            if not Path(p).exists():
                raise FileNotFoundError(f"input CSV {p} does not exist")


# required data columns per figure family
_QUENCH_NN = ("h0", "c_nn")
_QUENCH_NNN = ("h0", "c_nnn")
_SWEEP_NN = ("tau", "c_nn")
_SWEEP_NNN = ("tau", "c_nnn")

FIGURE_SCHEMAS: dict[str, tuple[str, ...]] = {
    "fig1a": _QUENCH_NN,
    "fig1b": _QUENCH_NNN,
    "fig2a": _QUENCH_NN,
    "fig2b": _QUENCH_NNN,
    "fig3a": _SWEEP_NN,
    "fig3b": _SWEEP_NNN,
    "fig4a": ("xi", "xi2", "tau_c", "c_max"),
    "fig4b": _SWEEP_NNN,
    "fig5": ("tau", "defect_density"),
}

# file-name patterns used to discover a figure's inputs inside a bundle dir
FIGURE_GLOBS: dict[str, tuple[str, ...]] = {
    "fig1a": ("quench_*.csv", "static.csv"),
    "fig1b": ("quench_*.csv", "static.csv"),
    "fig2a": ("quench_*.csv",),
    "fig2b": ("quench_*.csv",),
    "fig3a": ("sweep_tau_*.csv",),
    "fig3b": ("sweep_tau_*.csv",),
    "fig4a": ("sweep_xi.csv",),
    "fig4b": ("sweep_tau_*.csv",),
    "fig5": ("defects_*.csv",),
}


def discover_inputs(figure_id: str, bundle_dir: Path) -> list[Path]:
    """All bundle files matching the figure's filename patterns, sorted."""
    paths: list[Path] = []
    for pattern in FIGURE_GLOBS[figure_id]:
        paths.extend(Path(p) for p in glob.glob(str(Path(bundle_dir) / pattern)))
    return sorted(set(paths))


def discover_fits(figure_id: str, bundle_dir: Path) -> list[Path]:
    if figure_id not in ("fig4a", "fig4b"):
        return []
    return sorted(Path(p) for p in glob.glob(str(Path(bundle_dir) / "fit_*.json")))
