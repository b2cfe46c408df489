"""Breadth-first search over activation regions around a point.

Every region that may meet the epsilon-ball is visited at most once. Decision
boundaries are checked by projecting the query point onto them: a projection
that is misclassified (or tied) is a concrete counterexample; otherwise the
boundary is ambiguous and the search either gives up, records it and keeps
going (``full_queue``), or settles it exactly with the region solver
(``exact_fallback``).
"""

from __future__ import annotations

import enum
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .network import (
    ActivationPattern,
    ModelError,
    Network,
    activation_pattern,
    as_input,
    bits_key,
    check_pattern,
    classify,
    is_adversarial,
)
from .projection import hyperplane_distances
from .regions import (
    DEGENERATE_NORM,
    Constraint,
    ConstraintKind,
    compose_layers,
    frozen_forms,
    orient_activation,
)
from .solver import RegionProblem, SolverStatus, min_distance_on_boundary

WITNESS_TOL = 1e-9


class Status(enum.Enum):
    ROBUST = "robust"
    NOT_ROBUST = "not_robust"
    UNKNOWN = "unknown"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class CertifyConfig:
    epsilon: float
    full_queue: bool = False
    exact_fallback: bool = False
    batch_size: int = 32
    timeout: Optional[float] = None  # seconds
    max_regions: Optional[int] = None

    def __post_init__(self):
        if not (np.isfinite(self.epsilon) and self.epsilon > 0):
            raise ValueError(f"epsilon must be a positive finite number, got {self.epsilon}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.timeout is not None and self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_regions is not None and self.max_regions < 1:
            raise ValueError("max_regions must be >= 1")


@dataclass
class SearchStats:
    regions_visited: int = 0
    constraints_enqueued: int = 0
    constraints_filtered: int = 0
    boundary_projections: int = 0
    solver_calls: int = 0
    elapsed: float = 0.0


@dataclass
class CertificationResult:
    status: Status
    witness: Optional[np.ndarray] = None
    witness_distance: Optional[float] = None
    pending_boundaries: int = 0
    nearest_pending: Optional[float] = None
    stats: SearchStats = field(default_factory=SearchStats)
    visited_keys: Optional[set] = field(default=None, repr=False)


@dataclass(frozen=True)
class BoundaryEntry:
    source: np.ndarray  # pattern bits
    competitor: int
    normal: np.ndarray
    offset: float
    distance: float
    degenerate: bool = False  # zero normal, competitor never below the label


@dataclass(frozen=True)
class ActivationEntry:
    source: np.ndarray
    neuron: int
    distance: float


@dataclass
class RegionExpansion:
    bits: np.ndarray
    key: int
    boundaries: list
    activations: list
    generated: int


class WorkQueue:
    """Two FIFO lanes; boundaries always leave first."""

    def __init__(self):
        self.boundary_lane: deque = deque()
        self.activation_lane: deque = deque()

    def __len__(self):
        return len(self.boundary_lane) + len(self.activation_lane)

    def push(self, expansion: RegionExpansion) -> None:
        self.boundary_lane.extend(expansion.boundaries)
        self.activation_lane.extend(expansion.activations)

    def pop_activations(self, k: int) -> list:
        return [self.activation_lane.popleft() for _ in range(min(k, len(self.activation_lane)))]


def expand_patterns(
    net: Network, x: np.ndarray, label: int, masks: np.ndarray, epsilon: float, first_dist: np.ndarray | None = None
) -> list[RegionExpansion]:
    """Constraints of every region in ``masks`` that lie within ``epsilon`` of ``x``.

    All regions of the batch share one constraint-generation and one distance
    pass. ``first_dist`` optionally supplies the (pattern independent)
    first-layer distances.
    """
    masks = np.asarray(masks, dtype=bool)
    batch = masks.shape[0]
    layers = list(compose_layers(net, masks))
    dists = []
    for k, (W, b) in enumerate(layers[:-1]):
        if k == 0:
            d = first_dist if first_dist is not None else hyperplane_distances(x, W[0], b[0])[0]
            dists.append(np.broadcast_to(d, (batch, d.shape[0])))
        else:
            d, _, _ = hyperplane_distances(x, W, b)
            dists.append(d)
    act_d = np.concatenate(dists, axis=1) if dists else np.zeros((batch, 0))
    W, b = layers[-1]
    others = np.array([j for j in range(net.num_classes) if j != label], dtype=int)
    dec_w = W[:, others] - W[:, label:label + 1]  # (B, n-1, m)
    dec_b = b[:, others] - b[:, label:label + 1]
    dec_d, _, dec_n = hyperplane_distances(x, dec_w, dec_b)
    hit = (dec_n <= DEGENERATE_NORM) & (dec_b >= 0.0)
    dec_d = np.where(hit, 0.0, dec_d)
    keep_act = act_d <= epsilon
    keep_dec = dec_d <= epsilon
    generated = act_d.shape[1] + dec_d.shape[1]
    out = []
    for r in range(batch):
        bits = masks[r].copy()
        bits.setflags(write=False)
        boundaries = [
            BoundaryEntry(bits, int(others[k]), dec_w[r, k].copy(), float(dec_b[r, k]), float(dec_d[r, k]), bool(hit[r, k]))
            for k in np.flatnonzero(keep_dec[r])
        ]
        activations = [ActivationEntry(bits, int(u), float(act_d[r, u])) for u in np.flatnonzero(keep_act[r])]
        out.append(RegionExpansion(bits, bits_key(bits), boundaries, activations, generated))
    return out


def expand_region(net: Network, pattern: ActivationPattern, x, epsilon: float, label: int) -> list[tuple[Constraint, float]]:
    check_pattern(net, pattern)
    x = as_input(net, x)
    (exp,) = expand_patterns(net, x, label, pattern.bits[None, :].copy(), epsilon)
    out = [
        (Constraint(b.normal, b.offset, ConstraintKind.DECISION, b.competitor, pattern, b.degenerate), b.distance)
        for b in exp.boundaries
    ]
    if exp.activations:
        forms = frozen_forms(net, pattern.bits[None, :])
        w, b = orient_activation(pattern.bits, forms.neuron_weights[0], forms.neuron_bias[0])
        out += [
            (Constraint(w[a.neuron], float(b[a.neuron]), ConstraintKind.ACTIVATION, a.neuron, pattern), a.distance)
            for a in exp.activations
        ]
    return out


def region_problem(net: Network, x: np.ndarray, bits: np.ndarray, boundary: BoundaryEntry | None) -> RegionProblem:
    forms = frozen_forms(net, bits[None, :])
    G, h = orient_activation(bits, forms.neuron_weights[0], forms.neuron_bias[0])
    if boundary is None or boundary.degenerate:
        return RegionProblem(x, G, h)
    return RegionProblem(x, G, h, boundary.normal, boundary.offset)


def _check_network(net: Network) -> None:
    for k, layer in enumerate(net.layers):
        if not (np.all(np.isfinite(layer.weights)) and np.all(np.isfinite(layer.bias))):
            raise ModelError(f"layer {k} has non-finite parameters")


class _Search:
    def __init__(self, net: Network, x: np.ndarray, config: CertifyConfig):
        self.net = net
        self.x = x
        self.config = config
        self.eps = float(config.epsilon)
        self.label = classify(net, x)
        self.stats = SearchStats()
        self.visited: set[int] = set()
        self.queue = WorkQueue()
        self.ambiguous: list[float] = []
        self.home_key = None
        first = net.layers[0]
        self.first_dist = hyperplane_distances(x, first.weights, first.bias)[0] if net.num_hidden else None
        self.t0 = time.perf_counter()

    def _enqueue(self, expansions):
        for e in expansions:
            n_kept = len(e.boundaries) + len(e.activations)
            self.stats.constraints_enqueued += n_kept
            self.stats.constraints_filtered += e.generated - n_kept
            self.queue.push(e)

    def _out_of_budget(self) -> bool:
        c = self.config
        if c.timeout is not None and time.perf_counter() - self.t0 > c.timeout:
            return True
        return c.max_regions is not None and self.stats.regions_visited > c.max_regions

    def _result(self, status, witness=None):
        self.stats.elapsed = time.perf_counter() - self.t0
        dist = None if witness is None else float(np.linalg.norm(self.x - witness))
        nearest = min(self.ambiguous) if self.ambiguous else None
        pending = len(self.ambiguous) if status is Status.UNKNOWN else 0
        return CertificationResult(status, witness, dist, pending, nearest, self.stats, self.visited)

    def _valid_witness(self, p) -> bool:
        return float(np.linalg.norm(self.x - p)) <= self.eps + WITNESS_TOL and is_adversarial(self.net, p, self.label)

    def check_boundary(self, b: BoundaryEntry):
        """Return a witness, ``None`` when ruled out, or ``False`` when ambiguous."""
        self.stats.boundary_projections += 1
        if not b.degenerate:
            nn = float(b.normal @ b.normal)
            p = self.x - ((float(b.normal @ self.x) + b.offset) / nn) * b.normal
            if self._valid_witness(p):
                return p
        elif bits_key(b.source) == self.home_key and self._valid_witness(self.x):
            return self.x.copy()
        if not self.config.exact_fallback:
            return False
        self.stats.solver_calls += 1
        out = min_distance_on_boundary(region_problem(self.net, self.x, b.source, b))
        if out.status is SolverStatus.INFEASIBLE:
            return None
        if out.status is SolverStatus.FEASIBLE:
            if out.distance > self.eps:
                return None
            if self._valid_witness(out.witness):
                return out.witness
        return False

    def run(self) -> CertificationResult:
        x, net = self.x, self.net
        home = activation_pattern(net, x).bits[None, :].copy()
        (first,) = expand_patterns(net, x, self.label, home, self.eps, self.first_dist)
        self.home_key = first.key
        self.visited.add(first.key)
        self.stats.regions_visited = 1
        self._enqueue([first])
        q = self.queue
        while len(q):
            if self._out_of_budget():
                return self._result(Status.TIMEOUT)
            if q.boundary_lane:
                b = q.boundary_lane.popleft()
                found = self.check_boundary(b)
                if found is None:
                    continue
                if found is False:
                    self.ambiguous.append(b.distance)
                    if not self.config.full_queue:
                        return self._result(Status.UNKNOWN)
                    continue
                return self._result(Status.NOT_ROBUST, found)
            fresh = []
            for a in q.pop_activations(self.config.batch_size):
                bits = a.source.copy()
                bits[a.neuron] = ~bits[a.neuron]
                key = bits_key(bits)
                if key in self.visited:
                    continue
                self.visited.add(key)
                fresh.append(bits)
            if not fresh:
                continue
            self.stats.regions_visited += len(fresh)
            self._enqueue(expand_patterns(net, x, self.label, np.stack(fresh), self.eps, self.first_dist))
        if self.ambiguous:
            return self._result(Status.UNKNOWN)
        return self._result(Status.ROBUST)


def certify(net: Network, x, config: CertifyConfig) -> CertificationResult:
    x = as_input(net, x)
    _check_network(net)
    return _Search(net, x, config).run()


def certify_batch(net: Network, instances: Sequence[tuple], config: CertifyConfig, jobs: int = 1) -> list:
    """Certify each ``(x, epsilon)`` independently; failed slots hold the exception."""

    def one(inst):
        x, eps = inst
        try:
            return certify(net, x, replace(config, epsilon=float(eps)))
        except (ValueError, IndexError) as exc:
            return exc

    if jobs <= 1 or len(instances) <= 1:
        return [one(i) for i in instances]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(one, instances))
