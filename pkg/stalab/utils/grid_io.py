"""Grid field and residual report files.

CSV: one node per row, ``t, x, y, z`` then the 16 blade coefficients.
Binary: ``<stem>.json`` header (origin, spacing, counts, dtype, blade order)
next to ``<stem>.bin`` holding the row-major little-endian float64 block.
"""

import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd

from stalab import sta_core as sc
from stalab.field_lab.grid import Grid4
from stalab.utils.errors import StalabError

logger = logging.getLogger(__name__)

COORD_COLUMNS = ["t", "x", "y", "z"]
BINARY_DTYPE = "<f8"


def grid_frame(grid: Grid4, values: np.ndarray) -> pd.DataFrame:
    pts = grid.points().reshape(-1, 4)
    frame = pd.DataFrame(pts, columns=COORD_COLUMNS)
    coeffs = pd.DataFrame(np.asarray(values).reshape(-1, sc.DIM), columns=sc.BLADE_NAMES)
    return pd.concat([frame, coeffs], axis=1)


def write_grid_csv(path, grid: Grid4, values: np.ndarray) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    grid_frame(grid, values).to_csv(path, index=False, float_format="%.17g")
    logger.debug("wrote %d grid nodes to %s", grid.size, path)
    return path


def read_grid_csv(path) -> tuple[Grid4, np.ndarray]:
    """Rebuild the grid from the distinct coordinates on each axis."""
    frame = pd.read_csv(path)
    missing = [c for c in COORD_COLUMNS + sc.BLADE_NAMES if c not in frame.columns]
    if missing:
        raise StalabError(f"{path}: missing columns {missing}")
    frame = frame.sort_values(COORD_COLUMNS, kind="mergesort")
    axes = [np.unique(frame[c].to_numpy()) for c in COORD_COLUMNS]
    counts = tuple(len(a) for a in axes)
    spacing = tuple(float(a[1] - a[0]) if len(a) > 1 else 1.0 for a in axes)
    grid = Grid4(tuple(float(a[0]) for a in axes), spacing, counts)
    if len(frame) != grid.size:
        raise StalabError(f"{path}: {len(frame)} rows do not fill a {counts} grid")
    values = frame[sc.BLADE_NAMES].to_numpy(dtype=np.float64).reshape(counts + (sc.DIM,))
    return grid, values


def write_grid_binary(stem, grid: Grid4, values: np.ndarray) -> tuple[Path, Path]:
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    header = {
        "origin": list(grid.origin),
        "spacing": list(grid.spacing),
        "counts": list(grid.counts),
        "dtype": BINARY_DTYPE,
        "order": "C",
        "blades": sc.BLADE_NAMES,
    }
    header_path = stem.with_suffix(".json")
    data_path = stem.with_suffix(".bin")
    header_path.write_text(json.dumps(header, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    np.ascontiguousarray(values, dtype=BINARY_DTYPE).tofile(data_path)
    return header_path, data_path


def read_grid_binary(stem) -> tuple[Grid4, np.ndarray]:
    stem = Path(stem)
    header = json.loads(stem.with_suffix(".json").read_text(encoding="utf-8"))
    if header.get("dtype") != BINARY_DTYPE or header.get("blades") != sc.BLADE_NAMES:
        raise StalabError(f"{stem}: unsupported dtype or blade order in header")
    grid = Grid4(tuple(header["origin"]), tuple(header["spacing"]), tuple(header["counts"]))
    data = np.fromfile(stem.with_suffix(".bin"), dtype=BINARY_DTYPE)
    if data.size != grid.size * sc.DIM:
        raise StalabError(f"{stem}: expected {grid.size * sc.DIM} values, found {data.size}")
    return grid, data.reshape(grid.counts + (sc.DIM,))


def write_report_csv(path, frame: pd.DataFrame) -> Path:
    """Residual report keyed by node index."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=True, float_format="%.17g")
    return path
