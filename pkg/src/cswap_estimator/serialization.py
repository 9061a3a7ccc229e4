"""JSON wire formats.

Matrices are ``{"rows": r, "cols": c, "re": [...], "im": [...]}`` in row-major
order; density operators add ``"dim"``.  Floats go through ``repr`` (Python's
shortest round-tripping form), so a decode recovers the exact doubles.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .linalg import DensityOperator, as_matrix, validate_density


class MatrixFormatError(ValueError):
    """Document does not follow the matrix JSON layout."""


def matrix_to_json(m) -> dict:
    m = as_matrix(m)
    rows, cols = m.shape
    flat = m.reshape(-1)
    return {
        "rows": rows,
        "cols": cols,
        "re": [float(x) for x in flat.real],
        "im": [float(x) for x in flat.imag],
    }


def matrix_from_json(doc: dict) -> np.ndarray:
    try:
        rows, cols = int(doc["rows"]), int(doc["cols"])
        re = np.asarray(doc["re"], dtype=float)
        im = np.asarray(doc.get("im", [0.0] * len(doc["re"])), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixFormatError(f"malformed matrix document: {exc}") from exc
    if rows < 1 or cols < 1:
        raise MatrixFormatError(f"rows and cols must be positive, got {rows}x{cols}")
    if re.shape != (rows * cols,) or im.shape != (rows * cols,):
        raise MatrixFormatError(f"expected {rows * cols} entries in 're' and 'im'")
    m = (re + 1j * im).reshape(rows, cols)
    if not np.all(np.isfinite(m)):
        raise MatrixFormatError("matrix has non-finite entries")
    return m


def density_to_json(rho: DensityOperator) -> dict:
    doc = matrix_to_json(rho.matrix)
    doc["dim"] = rho.dim
    return doc


def density_from_json(doc: dict) -> DensityOperator:
    m = matrix_from_json(doc)
    if "dim" in doc and int(doc["dim"]) != m.shape[0]:
        raise MatrixFormatError(f"'dim' is {doc['dim']} but matrix is {m.shape[0]}x{m.shape[1]}")
    return validate_density(m)


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MatrixFormatError(f"cannot read {path}: {exc}") from exc


def dump_json(doc: dict, path=None) -> str:
    text = json.dumps(doc, indent=2, sort_keys=True)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text
