"""Certified lower bound on the minimal adversarial l2 distortion.

Same region walk as :mod:`projcert.certifier`, but constraints of both kinds
share one min-priority queue keyed by projection distance. The running bound
is the largest key dequeued so far; the first decision boundary to reach the
front ends the search.
"""

from __future__ import annotations

import enum
import heapq
import itertools
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .certifier import ActivationEntry, BoundaryEntry, SearchStats, _check_network, expand_patterns
from .network import Network, activation_pattern, as_input, bits_key, classify, is_adversarial
from .regions import frozen_forms, orient_activation

REGION_SLACK = 1e-9
WITNESS_TOL = 1e-9


class BoundStatus(enum.Enum):
    EXHAUSTED_AT_EPSILON = "exhausted_at_epsilon"
    STOPPED_AT_BOUNDARY = "stopped_at_boundary"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class LowerBoundConfig:
    timeout: Optional[float] = None  # seconds
    max_regions: Optional[int] = None


@dataclass
class LowerBoundOutcome:
    bound: float
    status: BoundStatus
    tight: bool = False
    witness: Optional[np.ndarray] = None
    stats: SearchStats = field(default_factory=SearchStats)
    trace: list = field(default_factory=list, repr=False)


def _inside_region(net: Network, bits: np.ndarray, p: np.ndarray) -> bool:
    forms = frozen_forms(net, bits[None, :])
    G, h = orient_activation(bits, forms.neuron_weights[0], forms.neuron_bias[0])
    if G.shape[0] == 0:
        return True
    norms = np.linalg.norm(G, axis=1)
    return bool(np.all(G @ p + h <= REGION_SLACK * np.maximum(norms, 1.0)))


def certified_lower_bound(net: Network, x, epsilon_max: float, config: LowerBoundConfig | None = None) -> LowerBoundOutcome:
    x = as_input(net, x)
    _check_network(net)
    if not (np.isfinite(epsilon_max) and epsilon_max > 0):
        raise ValueError(f"epsilon_max must be a positive finite number, got {epsilon_max}")
    config = config or LowerBoundConfig()
    t0 = time.perf_counter()
    label = classify(net, x)
    stats = SearchStats()
    heap: list = []
    seq = itertools.count()

    def push(expansions):
        for e in expansions:
            kept = e.boundaries + e.activations
            stats.constraints_enqueued += len(kept)
            stats.constraints_filtered += e.generated - len(kept)
            # boundaries before activations, as generated; ties resolve FIFO
            for entry in kept:
                heapq.heappush(heap, (entry.distance, next(seq), entry))

    home = activation_pattern(net, x).bits[None, :].copy()
    (first,) = expand_patterns(net, x, label, home, epsilon_max)
    home_key = first.key
    visited = {first.key}
    stats.regions_visited = 1
    push([first])
    bound = 0.0
    trace = []

    def done(status, tight=False, witness=None, value=None):
        stats.elapsed = time.perf_counter() - t0
        return LowerBoundOutcome(bound if value is None else value, status, tight, witness, stats, trace)

    while heap:
        if config.timeout is not None and time.perf_counter() - t0 > config.timeout:
            return done(BoundStatus.TIMEOUT)
        if config.max_regions is not None and stats.regions_visited > config.max_regions:
            return done(BoundStatus.TIMEOUT)
        dist, _, entry = heapq.heappop(heap)
        bound = max(bound, dist)
        trace.append(bound)
        if isinstance(entry, BoundaryEntry):
            stats.boundary_projections += 1
            witness = _tight_witness(net, x, label, entry, bound, home_key)
            return done(BoundStatus.STOPPED_AT_BOUNDARY, witness is not None, witness)
        assert isinstance(entry, ActivationEntry)
        bits = entry.source.copy()
        bits[entry.neuron] = ~bits[entry.neuron]
        key = bits_key(bits)
        if key in visited:
            continue
        visited.add(key)
        stats.regions_visited += 1
        push(expand_patterns(net, x, label, bits[None, :], epsilon_max))
    return done(BoundStatus.EXHAUSTED_AT_EPSILON, value=float(epsilon_max))


def _tight_witness(net, x, label, entry: BoundaryEntry, bound: float, home_key: int):
    if entry.degenerate:
        if bits_key(entry.source) == home_key and bound == 0.0 and is_adversarial(net, x, label):
            return x.copy()
        return None
    nn = float(entry.normal @ entry.normal)
    p = x - ((float(entry.normal @ x) + entry.offset) / nn) * entry.normal
    if abs(float(np.linalg.norm(x - p)) - bound) > WITNESS_TOL:
        return None
    if not _inside_region(net, entry.source, p):
        return None
    if not is_adversarial(net, p, label):
        return None
    return p
