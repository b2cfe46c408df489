"""Closed-form l2 projections onto hyperplanes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .regions import DEGENERATE_NORM, Constraint


@dataclass(frozen=True)
class ProjectionResult:
    distance: float
    point: Optional[np.ndarray]


def project_onto(x: np.ndarray, normal: np.ndarray, offset: float, norm: float | None = None) -> ProjectionResult:
    if norm is None:
        norm = float(np.linalg.norm(normal))
    if norm <= DEGENERATE_NORM:
        return ProjectionResult(np.inf, None)
    value = float(normal @ x + offset)
    p = x - (value / (norm * norm)) * normal
    return ProjectionResult(abs(value) / norm, p)


def project(x, c: Constraint) -> ProjectionResult:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != c.normal.shape:
        raise ValueError(f"point has shape {x.shape}, constraint normal has {c.normal.shape}")
    return project_onto(x, c.normal, c.offset)


def hyperplane_distances(x: np.ndarray, normals: np.ndarray, offsets: np.ndarray, norms: np.ndarray | None = None):
    """Distances from ``x`` to the rows of ``normals @ x + offsets = 0``.

    Works on any leading batch shape. Rows with norm below the degeneracy
    threshold get ``inf``. Returns ``(distances, values, norms)``.
    """
    values = normals @ x + offsets
    if norms is None:
        norms = np.sqrt(np.einsum("...i,...i->...", normals, normals))
    degenerate = norms <= DEGENERATE_NORM
    with np.errstate(divide="ignore", invalid="ignore"):
        dist = np.abs(values) / norms
    dist = np.where(degenerate, np.inf, dist)
    return dist, values, norms


def batch_distances(x, constraints: Sequence[Constraint]) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if not constraints:
        return np.zeros(0)
    normals = np.stack([c.normal for c in constraints])
    if normals.shape[1] != x.shape[0]:
        raise ValueError(f"point has dimension {x.shape[0]}, constraints have {normals.shape[1]}")
    offsets = np.array([c.offset for c in constraints])
    return hyperplane_distances(x, normals, offsets)[0]
