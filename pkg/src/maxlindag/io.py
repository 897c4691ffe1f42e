"""File formats: JSON model files, CSV matrices, DOT export.

Floats are serialized with 17 significant digits, so a write-then-read
round trip is lossless.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import FormatError
from .graph import Dag
from .mlcm import WeightedModel


def dumps_model(model: WeightedModel) -> str:
    """Serialize a model as a JSON key/value tree."""
    payload = {
        "alpha": model.alpha,
        "d": model.d,
        "noise_scales": list(model.noise_scales),
        "edges": [[k, i, c] for (k, i), c in sorted(model.edge_weights.items())],
    }
    return json.dumps(payload, indent=2) + "\n"


def write_model(model: WeightedModel, path: str | Path) -> None:
    Path(path).write_text(dumps_model(model))


def loads_model(text: str) -> WeightedModel:
    """Parse a model file; any structural problem raises :class:`FormatError`."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"model file is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise FormatError("model file must contain a JSON object")
    missing = {"alpha", "d", "noise_scales", "edges"} - set(payload)
    if missing:
        raise FormatError(f"model file is missing keys: {sorted(missing)}")
    try:
        d = int(payload["d"])
        alpha = float(payload["alpha"])
        scales = tuple(float(c) for c in payload["noise_scales"])
        edges = {}
        for entry in payload["edges"]:
            k, i, c = entry
            edges[(int(k), int(i))] = float(c)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"model file has malformed values: {exc}") from exc
    try:
        dag = Dag(d, set(edges))
        return WeightedModel(dag, edges, scales, alpha)
    except Exception as exc:
        raise FormatError(f"model file does not describe a valid model: {exc}") from exc


def read_model(path: str | Path) -> WeightedModel:
    return loads_model(Path(path).read_text())


def dumps_matrix(matrix: np.ndarray) -> str:
    """Serialize a matrix as plain CSV, row-major."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2:
        raise FormatError(f"expected a 2-d matrix, got shape {matrix.shape}")
    return "\n".join(",".join(f"{v:.17g}" for v in row) for row in matrix) + "\n"


def write_matrix(matrix: np.ndarray, path: str | Path) -> None:
    Path(path).write_text(dumps_matrix(matrix))


def loads_matrix(text: str) -> np.ndarray:
    """Parse a CSV matrix; ragged rows or non-numeric cells raise :class:`FormatError`."""
    rows: list[list[float]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        cells = line.split(",")
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise FormatError(f"matrix line {lineno} has a non-numeric cell: {exc}") from exc
    if not rows:
        raise FormatError("matrix file is empty")
    width = len(rows[0])
    for lineno, row in enumerate(rows, start=1):
        if len(row) != width:
            raise FormatError(
                f"matrix row {lineno} has {len(row)} cells, expected {width}"
            )
    return np.asarray(rows, dtype=float)


def read_matrix(path: str | Path) -> np.ndarray:
    return loads_matrix(Path(path).read_text())


def model_to_dot(model: WeightedModel) -> str:
    """DOT description of the model's DAG, edges labeled with their weights."""
    lines = ["digraph model {"]
    for i in range(1, model.d + 1):
        lines.append(f"  {i};")
    for (k, i), c in sorted(model.edge_weights.items()):
        lines.append(f'  {k} -> {i} [label="{c:.6g}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def dag_to_dot(dag: Dag) -> str:
    """DOT description of a bare DAG."""
    lines = ["digraph dag {"]
    for i in range(1, dag.d + 1):
        lines.append(f"  {i};")
    for k, i in sorted(dag.edges):
        lines.append(f"  {k} -> {i};")
    lines.append("}")
    return "\n".join(lines) + "\n"
