"""Affine forms, oriented constraints and neighbours of activation regions.

Inside the region of a fixed activation pattern every ReLU acts as a 0/1 mask,
so each neuron and each logit is an affine function of the input. The
coefficients are obtained by composing the masked layer matrices; nothing here
needs a concrete point of the region.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .network import ActivationPattern, Network, PatternShapeError, check_pattern

DEGENERATE_NORM = 1e-12


class ConstraintKind(enum.Enum):
    ACTIVATION = "activation"
    DECISION = "decision"


@dataclass(frozen=True, eq=False)
class Constraint:
    """Oriented hyperplane ``normal @ x + offset = 0``.

    The open side ``normal @ x + offset < 0`` is the inside of the source
    region (activation constraints) or the side where the fixed label wins
    (decision constraints). ``index`` is the neuron id or the competitor class.
    """

    normal: np.ndarray
    offset: float
    kind: ConstraintKind
    index: int
    source: ActivationPattern
    degenerate: bool = False

    @property
    def is_decision_boundary(self) -> bool:
        return self.kind is ConstraintKind.DECISION


@dataclass(frozen=True)
class RegionAffineMap:
    logit_weights: np.ndarray  # (n, m)
    logit_bias: np.ndarray  # (n,)
    neuron_weights: np.ndarray  # (N, m), layer-major
    neuron_bias: np.ndarray  # (N,)


@dataclass(frozen=True)
class FrozenForms:
    """Batched affine forms for B patterns."""

    neuron_weights: np.ndarray  # (B, N, m)
    neuron_bias: np.ndarray  # (B, N)
    logit_weights: np.ndarray  # (B, n, m)
    logit_bias: np.ndarray  # (B, n)


def compose_layers(net: Network, masks: np.ndarray):
    """Yield ``(W, b)`` for each hidden layer, then for the logits.

    ``W`` has shape (B, width, m) and ``b`` (B, width). Deeper layers are
    carried as coefficients on the first layer's outputs, so the only
    input-width product per layer is one matrix multiply for the whole batch.
    """
    batch = masks.shape[0]
    first = net.layers[0]
    W1 = first.weights
    yield np.broadcast_to(W1, (batch,) + W1.shape), np.broadcast_to(first.bias, (batch, first.out_width))
    if len(net.layers) == 1:
        return
    m = net.input_dim
    h0 = first.out_width
    D = None  # (B, width, h0)
    c = np.broadcast_to(first.bias, (batch, h0))
    start = 0
    for layer in net.layers[1:]:
        width = layer.in_width
        a = masks[:, start:start + width].astype(np.float64)
        start += width
        if D is None:
            D = layer.weights[None, :, :] * a[:, None, :]
        else:
            D = np.matmul(layer.weights, D * a[:, :, None])
        c = (c * a) @ layer.weights.T + layer.bias
        out = layer.out_width
        W = (D.reshape(batch * out, h0) @ W1).reshape(batch, out, m)
        yield W, c


def frozen_forms(net: Network, masks: np.ndarray) -> FrozenForms:
    """Compose the masked network for each row of ``masks`` (B, N) at once."""
    masks = np.asarray(masks, dtype=bool)
    if masks.ndim != 2 or masks.shape[1] != net.num_hidden:
        raise PatternShapeError(f"masks must have shape (B, {net.num_hidden}), got {masks.shape}")
    batch = masks.shape[0]
    forms = list(compose_layers(net, masks))
    W, b = forms[-1]
    if len(forms) > 1:
        nw = np.concatenate([f[0] for f in forms[:-1]], axis=1)
        nb = np.concatenate([f[1] for f in forms[:-1]], axis=1)
    else:
        nw = np.zeros((batch, 0, net.input_dim))
        nb = np.zeros((batch, 0))
    return FrozenForms(nw, nb, np.ascontiguousarray(W), np.ascontiguousarray(b))


def region_affine_map(net: Network, pattern: ActivationPattern) -> RegionAffineMap:
    check_pattern(net, pattern)
    f = frozen_forms(net, pattern.bits[None, :])
    return RegionAffineMap(f.logit_weights[0], f.logit_bias[0], f.neuron_weights[0], f.neuron_bias[0])


def orient_activation(bits: np.ndarray, weights: np.ndarray, bias: np.ndarray):
    """Flip sign for active neurons so that the region interior is ``< 0``."""
    sign = np.where(bits, -1.0, 1.0)
    return weights * sign[..., None], bias * sign


def decision_rows(logit_weights: np.ndarray, logit_bias: np.ndarray, label: int):
    """Rows ``f_j - f_label`` for every competitor ``j``, and the competitor ids."""
    n = logit_weights.shape[-2]
    others = np.array([j for j in range(n) if j != label], dtype=int)
    w = logit_weights[..., others, :] - logit_weights[..., label:label + 1, :]
    b = logit_bias[..., others] - logit_bias[..., label:label + 1]
    return w, b, others


def activation_constraints(net: Network, pattern: ActivationPattern) -> list[Constraint]:
    amap = region_affine_map(net, pattern)
    w, b = orient_activation(pattern.bits, amap.neuron_weights, amap.neuron_bias)
    norms = np.linalg.norm(w, axis=1)
    return [
        Constraint(w[u], float(b[u]), ConstraintKind.ACTIVATION, u, pattern, bool(norms[u] <= DEGENERATE_NORM))
        for u in range(pattern.size)
    ]


def decision_constraints(net: Network, pattern: ActivationPattern, label: int) -> list[Constraint]:
    if not 0 <= label < net.num_classes:
        raise ValueError(f"label {label} out of range for {net.num_classes} classes")
    amap = region_affine_map(net, pattern)
    w, b, others = decision_rows(amap.logit_weights, amap.logit_bias, label)
    norms = np.linalg.norm(w, axis=1)
    return [
        Constraint(w[k], float(b[k]), ConstraintKind.DECISION, int(j), pattern, bool(norms[k] <= DEGENERATE_NORM))
        for k, j in enumerate(others)
    ]


def region_inequalities(net: Network, pattern: ActivationPattern) -> tuple[np.ndarray, np.ndarray]:
    """Closed description ``G @ x + h <= 0`` of the region of ``pattern``."""
    amap = region_affine_map(net, pattern)
    return orient_activation(pattern.bits, amap.neuron_weights, amap.neuron_bias)


def flip(pattern: ActivationPattern, u: int) -> ActivationPattern:
    if not 0 <= u < pattern.size:
        raise IndexError(f"neuron id {u} out of range for {pattern.size} neurons")
    bits = pattern.bits.copy()
    bits[u] = ~bits[u]
    return ActivationPattern(bits, pattern.widths)


def pattern_key(pattern: ActivationPattern) -> int:
    return pattern.key
