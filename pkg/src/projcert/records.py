"""Machine-readable per-instance result records (one JSON object per line)."""

from __future__ import annotations

import json
import math

from .certifier import CertificationResult, SearchStats, Status
from .lower_bound import LowerBoundOutcome
from .oracle import Distortion

STATUSES = (
    "robust",
    "not_robust",
    "unknown",
    "timeout",
    "exhausted_at_epsilon",
    "stopped_at_boundary",
)

_number_or_null = {"type": ["number", "null"]}

RECORD_SCHEMA = {
    "type": "object",
    "required": ["id", "mode", "status", "witness", "tight", "stats"],
    "additionalProperties": False,
    "properties": {
        "id": {"type": "integer", "minimum": 0},
        "mode": {"enum": ["certify", "lower-bound", "oracle"]},
        "epsilon": _number_or_null,
        "epsilon_max": {"type": "number"},
        "status": {"enum": [*STATUSES, None]},
        "bound": {"type": "number", "minimum": 0},
        "distortion": _number_or_null,
        "witness": {"type": ["array", "null"], "items": {"type": "number"}},
        "witness_distance": _number_or_null,
        "tight": {"type": "boolean"},
        "pending_boundaries": {"type": "integer", "minimum": 0},
        "stats": {
            "type": "object",
            "required": ["regions_visited", "constraints_enqueued", "solver_calls", "elapsed_ms"],
            "properties": {
                "regions_visited": {"type": "integer", "minimum": 0},
                "constraints_enqueued": {"type": "integer", "minimum": 0},
                "constraints_filtered": {"type": "integer", "minimum": 0},
                "boundary_projections": {"type": "integer", "minimum": 0},
                "solver_calls": {"type": "integer", "minimum": 0},
                "elapsed_ms": {"type": "number", "minimum": 0},
            },
        },
    },
    "allOf": [
        {
            # witness present iff not_robust or tight
            "if": {"anyOf": [{"properties": {"status": {"const": "not_robust"}}},
                             {"properties": {"tight": {"const": True}}}]},
            "then": {"properties": {"witness": {"type": "array"}}},
            "else": {"properties": {"witness": {"type": "null"}}},
        }
    ],
}


def _stats(stats: SearchStats | None) -> dict:
    if stats is None:
        return {"regions_visited": 0, "constraints_enqueued": 0, "solver_calls": 0, "elapsed_ms": 0.0}
    return {
        "regions_visited": stats.regions_visited,
        "constraints_enqueued": stats.constraints_enqueued,
        "constraints_filtered": stats.constraints_filtered,
        "boundary_projections": stats.boundary_projections,
        "solver_calls": stats.solver_calls,
        "elapsed_ms": stats.elapsed * 1e3,
    }


def _vec(v):
    return None if v is None else [float(t) for t in v]


def certify_record(idx: int, epsilon: float, res: CertificationResult) -> dict:
    rec = {
        "id": idx,
        "mode": "certify",
        "epsilon": float(epsilon),
        "status": res.status.value,
        "witness": _vec(res.witness) if res.status is Status.NOT_ROBUST else None,
        "witness_distance": res.witness_distance if res.status is Status.NOT_ROBUST else None,
        "tight": False,
        "stats": _stats(res.stats),
    }
    if res.status is Status.UNKNOWN:
        rec["pending_boundaries"] = res.pending_boundaries
    return rec


def lower_bound_record(idx: int, epsilon_max: float, out: LowerBoundOutcome) -> dict:
    return {
        "id": idx,
        "mode": "lower-bound",
        "epsilon_max": float(epsilon_max),
        "status": out.status.value,
        "bound": float(out.bound),
        "witness": _vec(out.witness) if out.tight else None,
        "tight": bool(out.tight),
        "stats": _stats(out.stats),
    }


def oracle_record(idx: int, dist: Distortion, epsilon: float | None, elapsed: float) -> dict:
    finite = math.isfinite(dist.distance)
    status = None
    if epsilon is not None:
        status = "robust" if dist.distance > epsilon else "not_robust"
    stats = SearchStats(elapsed=elapsed)
    return {
        "id": idx,
        "mode": "oracle",
        "epsilon": None if epsilon is None else float(epsilon),
        "status": status,
        "distortion": float(dist.distance) if finite else None,
        "witness": _vec(dist.witness) if status == "not_robust" else None,
        "tight": False,
        "stats": _stats(stats),
    }


def dumps(record: dict) -> str:
    return json.dumps(record, allow_nan=False)


def strip_timing(record: dict) -> dict:
    out = dict(record)
    out["stats"] = {k: v for k, v in record["stats"].items() if k != "elapsed_ms"}
    return out
