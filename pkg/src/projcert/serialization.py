"""JSON model files and input lists.

Floats are written with Python's shortest round-trip repr, so a save/load
cycle reproduces every 64-bit value exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .network import LinearLayer, ModelError, Network

FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    pass


def network_to_dict(net: Network) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "input_dim": net.input_dim,
        "activation": "relu",
        "layers": [{"weights": l.weights.tolist(), "bias": l.bias.tolist()} for l in net.layers],
    }


def _matrix(value, where: str) -> np.ndarray:
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise ModelFormatError(f"{where}: expected a non-empty list of rows")
    widths = {len(r) for r in value}
    if len(widths) != 1:
        raise ModelFormatError(f"{where}: rows have differing lengths {sorted(widths)}")
    try:
        arr = np.array(value, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ModelFormatError(f"{where}: non-numeric entry") from exc
    return arr


def network_from_dict(doc: dict) -> Network:
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be a JSON object")
    for key in ("format_version", "input_dim", "layers"):
        if key not in doc:
            raise ModelFormatError(f"missing field '{key}'")
    if doc["format_version"] != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format_version {doc['format_version']!r}")
    if doc.get("activation", "relu") != "relu":
        raise ModelFormatError(f"unsupported activation {doc['activation']!r}")
    input_dim = doc["input_dim"]
    if not isinstance(input_dim, int) or input_dim < 1:
        raise ModelFormatError(f"input_dim must be a positive integer, got {input_dim!r}")
    raw = doc["layers"]
    if not isinstance(raw, list) or not raw:
        raise ModelFormatError("'layers' must be a non-empty list")
    layers = []
    expected_in = input_dim
    for k, entry in enumerate(raw):
        if not isinstance(entry, dict):
            raise ModelFormatError(f"layers[{k}]: expected an object")
        for key in ("weights", "bias"):
            if key not in entry:
                raise ModelFormatError(f"layers[{k}]: missing field '{key}'")
        W = _matrix(entry["weights"], f"layers[{k}].weights")
        try:
            b = np.array(entry["bias"], dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise ModelFormatError(f"layers[{k}].bias: non-numeric entry") from exc
        if b.ndim != 1 or b.shape[0] != W.shape[0]:
            raise ModelFormatError(f"layers[{k}].bias: length {b.size} does not match {W.shape[0]} output rows")
        if W.shape[1] != expected_in:
            raise ModelFormatError(f"layers[{k}].weights: input width {W.shape[1]}, expected {expected_in}")
        try:
            layers.append(LinearLayer(W, b))
        except ModelError as exc:
            raise ModelFormatError(f"layers[{k}]: {exc}") from exc
        expected_in = W.shape[0]
    return Network(tuple(layers))


def save_model(net: Network, path) -> None:
    Path(path).write_text(json.dumps(network_to_dict(net), indent=1) + "\n")


def load_model(path) -> Network:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from exc
    return network_from_dict(doc)


def load_inputs(path, dim: int | None = None) -> list[np.ndarray]:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not valid JSON ({exc.msg})") from exc
    if not isinstance(doc, list):
        raise ModelFormatError(f"{path}: expected a list of vectors")
    out = []
    for k, v in enumerate(doc):
        try:
            arr = np.array(v, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise ModelFormatError(f"inputs[{k}]: non-numeric entry") from exc
        if arr.ndim != 1 or (dim is not None and arr.shape[0] != dim):
            raise ModelFormatError(f"inputs[{k}]: expected a vector of length {dim}, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ModelFormatError(f"inputs[{k}]: non-finite entry")
        out.append(arr)
    return out


def save_inputs(points, path) -> None:
    Path(path).write_text(json.dumps([np.asarray(p, dtype=np.float64).tolist() for p in points]) + "\n")
