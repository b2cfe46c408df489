"""Brute-force ground truth for small networks.

Feasible activation patterns are enumerated depth-first, one neuron at a
time; a prefix whose closed constraint set is empty prunes every extension.
Minimal adversarial distortion is then the smallest exact distance from the
query point to a decision hyperplane intersected with a region, over every
feasible region and every competing class.

Affine forms are composed here directly rather than through
:mod:`projcert.regions`, so this module does not share code with the search it
is used to validate (it does rely on :mod:`projcert.solver`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .network import ActivationPattern, Network, activation_pattern, as_input, classify
from .solver import RegionProblem, feasibility, min_distance_on_boundary

MAX_NEURONS = 20


class CapacityError(ValueError):
    pass


@dataclass(frozen=True)
class CatalogEntry:
    pattern: ActivationPattern
    witness: np.ndarray
    G: np.ndarray  # region: G @ x + h <= 0
    h: np.ndarray
    logit_weights: np.ndarray
    logit_bias: np.ndarray


@dataclass(frozen=True)
class RegionCatalog:
    entries: tuple[CatalogEntry, ...]

    def __len__(self):
        return len(self.entries)

    @property
    def patterns(self) -> list[ActivationPattern]:
        return [e.pattern for e in self.entries]


@dataclass(frozen=True)
class Distortion:
    distance: float
    witness: Optional[np.ndarray]
    pattern: Optional[ActivationPattern] = None
    competitor: Optional[int] = None


def enumerate_feasible_patterns(net: Network, max_neurons: int = MAX_NEURONS) -> RegionCatalog:
    n_hidden = net.num_hidden
    if n_hidden > max_neurons:
        raise CapacityError(f"{n_hidden} hidden neurons exceeds the enumeration limit of {max_neurons}")
    m = net.input_dim
    layers = net.layers
    widths = net.hidden_widths
    entries: list[CatalogEntry] = []

    def finish(bits, W, b, G, h, witness):
        last = layers[-1]
        if len(layers) > 1:
            a = np.asarray(bits[-widths[-1]:], dtype=np.float64)
            W, b = last.weights @ (W * a[:, None]), last.weights @ (b * a) + last.bias
        pattern = ActivationPattern(np.array(bits, dtype=bool), widths)
        entries.append(CatalogEntry(pattern, witness, np.array(G).reshape(-1, m), np.array(h), W, b))

    def descend(k, i, bits, W, b, G, h, witness):
        # W, b: pre-activation forms of hidden layer k under the masks in ``bits``
        if i == widths[k]:
            if k + 1 == len(widths):
                finish(bits, W, b, G, h, witness)
                return
            a = np.asarray(bits[-widths[k]:], dtype=np.float64)
            nxt = layers[k + 1]
            W2 = nxt.weights @ (W * a[:, None])
            b2 = nxt.weights @ (b * a) + nxt.bias
            descend(k + 1, 0, bits, W2, b2, G, h, witness)
            return
        for bit in (False, True):
            sign = -1.0 if bit else 1.0
            g, c = sign * W[i], sign * b[i]
            if float(g @ witness + c) <= 0.0:
                w_new = witness
            else:
                out = feasibility(np.array(G + [g]).reshape(-1, m), np.array(h + [c]), center=witness)
                if not out.feasible:
                    continue
                w_new = out.witness
            descend(k, i + 1, bits + [bit], W, b, G + [g], h + [c], w_new)

    if not widths:
        first = layers[0]
        entries.append(
            CatalogEntry(ActivationPattern(np.zeros(0, bool), ()), np.zeros(m), np.zeros((0, m)), np.zeros(0),
                         first.weights.copy(), first.bias.copy())
        )
    else:
        first = layers[0]
        descend(0, 0, [], first.weights, first.bias, [], [], np.zeros(m))
    return RegionCatalog(tuple(entries))


def exact_min_distortion(net: Network, x, catalog: RegionCatalog | None = None) -> Distortion:
    """Smallest l2 distance from ``x`` to an input whose label differs or ties."""
    x = as_input(net, x)
    if catalog is None:
        catalog = enumerate_feasible_patterns(net)
    label = classify(net, x)
    best = Distortion(np.inf, None)
    for e in catalog.entries:
        for j in range(net.num_classes):
            if j == label:
                continue
            w = e.logit_weights[j] - e.logit_weights[label]
            c = float(e.logit_bias[j] - e.logit_bias[label])
            norm = float(np.linalg.norm(w))
            if norm <= 1e-12:
                if c < 0.0:
                    continue
                problem = RegionProblem(x, e.G, e.h)
            else:
                # the hyperplane alone is already no closer than the best so far
                if abs(float(w @ x) + c) / norm >= best.distance:
                    continue
                problem = RegionProblem(x, e.G, e.h, w, c)
            out = min_distance_on_boundary(problem)
            if out.feasible and out.distance < best.distance:
                best = Distortion(out.distance, out.witness, e.pattern, j)
    return best


def robust_oracle(net: Network, x, epsilon: float, catalog: RegionCatalog | None = None) -> bool:
    return exact_min_distortion(net, x, catalog).distance > epsilon


def segment_patterns(net: Network, x, p, step: float = 1e-4) -> list[ActivationPattern]:
    """Distinct consecutive activation patterns met along the segment ``x -> p``."""
    x = as_input(net, x)
    p = as_input(net, p)
    length = float(np.linalg.norm(p - x))
    n = max(1, int(np.ceil(length / step)))
    out: list[ActivationPattern] = []
    for t in np.linspace(0.0, 1.0, n + 1):
        pat = activation_pattern(net, x + t * (p - x))
        if not out or out[-1] != pat:
            out.append(pat)
    return out
