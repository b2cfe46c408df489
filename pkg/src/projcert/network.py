"""Feed-forward ReLU classifiers: evaluation, classification and activation patterns."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

TIE_TOL = 1e-9


class InputShapeError(ValueError):
    pass


class ModelError(ValueError):
    """Malformed network (shape mismatch or non-finite parameters)."""


class PatternShapeError(ValueError):
    pass


@dataclass(frozen=True)
class LinearLayer:
    weights: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        b = np.array(self.bias, dtype=np.float64).reshape(-1)
        if w.ndim != 2:
            raise ModelError(f"weights must be 2-D, got shape {w.shape}")
        if b.shape[0] != w.shape[0]:
            raise ModelError(f"bias length {b.shape[0]} does not match weight rows {w.shape[0]}")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise ModelError("layer parameters must be finite")
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)

    @property
    def in_width(self) -> int:
        return self.weights.shape[1]

    @property
    def out_width(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class Network:
    """Affine layers with ReLU after every layer except the last."""

    layers: tuple[LinearLayer, ...]
    hidden_widths: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        layers = tuple(
            l if isinstance(l, LinearLayer) else LinearLayer(*l) for l in self.layers
        )
        if not layers:
            raise ModelError("network needs at least one layer")
        for k in range(1, len(layers)):
            if layers[k].in_width != layers[k - 1].out_width:
                raise ModelError(
                    f"layer {k} expects input width {layers[k].in_width}, "
                    f"previous layer produces {layers[k - 1].out_width}"
                )
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "hidden_widths", tuple(l.out_width for l in layers[:-1]))

    @classmethod
    def from_arrays(cls, weights: Sequence, biases: Sequence) -> "Network":
        return cls(tuple(LinearLayer(w, b) for w, b in zip(weights, biases)))

    @property
    def input_dim(self) -> int:
        return self.layers[0].in_width

    @property
    def num_classes(self) -> int:
        return self.layers[-1].out_width

    @property
    def num_hidden(self) -> int:
        return sum(self.hidden_widths)


def as_input(net: Network, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (net.input_dim,):
        raise InputShapeError(f"expected input of shape ({net.input_dim},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InputShapeError("input coordinates must be finite")
    return x


def pre_activations(net: Network, x) -> list[np.ndarray]:
    """Pre-activation values of every hidden layer, in layer order."""
    h = as_input(net, x)
    out = []
    for layer in net.layers[:-1]:
        z = layer.weights @ h + layer.bias
        out.append(z)
        h = np.maximum(z, 0.0)
    return out


def forward(net: Network, x) -> np.ndarray:
    h = as_input(net, x)
    for layer in net.layers[:-1]:
        h = np.maximum(layer.weights @ h + layer.bias, 0.0)
    last = net.layers[-1]
    return last.weights @ h + last.bias


def classify_logits(logits: np.ndarray) -> int:
    # np.argmax returns the first maximal index, i.e. ties go to the lowest class
    return int(np.argmax(logits))


def logits_tied(logits: np.ndarray, tol: float = TIE_TOL) -> bool:
    if logits.shape[0] < 2:
        return False
    top2 = np.partition(logits, -2)[-2:]
    return bool(top2[1] - top2[0] <= tol)


def classify(net: Network, x) -> int:
    return classify_logits(forward(net, x))


def on_decision_boundary(net: Network, x, tol: float = TIE_TOL) -> bool:
    """True when the two largest logits agree within ``tol``."""
    return logits_tied(forward(net, x), tol)


def is_adversarial(net: Network, p, label: int) -> bool:
    logits = forward(net, p)
    return classify_logits(logits) != label or logits_tied(logits)


@dataclass(frozen=True, eq=False)
class ActivationPattern:
    """Per-neuron activation bits, flattened layer-major.

    Equality and hashing go through :attr:`key`, so patterns can be used in sets.
    """

    bits: np.ndarray
    widths: tuple[int, ...]

    def __post_init__(self):
        bits = np.array(self.bits, dtype=bool).reshape(-1)
        widths = tuple(int(w) for w in self.widths)
        if bits.shape[0] != sum(widths):
            raise PatternShapeError(
                f"pattern has {bits.shape[0]} bits but layout {widths} needs {sum(widths)}"
            )
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "widths", widths)
        object.__setattr__(self, "_key", bits_key(bits))

    @classmethod
    def from_layers(cls, layer_bits: Sequence[Sequence[bool]]) -> "ActivationPattern":
        widths = tuple(len(b) for b in layer_bits)
        flat = np.concatenate([np.asarray(b, dtype=bool) for b in layer_bits]) if widths else np.zeros(0, bool)
        return cls(flat, widths)

    @property
    def key(self) -> int:
        return self._key

    @property
    def size(self) -> int:
        return self.bits.shape[0]

    def layers(self) -> list[np.ndarray]:
        return np.split(self.bits, np.cumsum(self.widths)[:-1]) if self.widths else []

    def __eq__(self, other):
        if not isinstance(other, ActivationPattern):
            return NotImplemented
        return self.widths == other.widths and self._key == other._key

    def __hash__(self):
        return hash((self.widths, self._key))

    def __repr__(self):
        groups = ["".join("1" if b else "0" for b in layer) for layer in self.layers()]
        return f"ActivationPattern({'|'.join(groups)})"


def bits_key(bits: np.ndarray) -> int:
    """MSB-first integer of a flat bit vector (neuron 0 is the most significant bit)."""
    n = bits.shape[0]
    if n == 0:
        return 0
    return int.from_bytes(np.packbits(bits).tobytes(), "big") >> ((-n) % 8)


def activation_pattern(net: Network, x) -> ActivationPattern:
    pre = pre_activations(net, x)
    flat = np.concatenate(pre) >= 0.0 if pre else np.zeros(0, dtype=bool)
    return ActivationPattern(flat, net.hidden_widths)


def check_pattern(net: Network, pattern: ActivationPattern) -> None:
    if pattern.widths != net.hidden_widths:
        raise PatternShapeError(
            f"pattern layout {pattern.widths} does not match hidden widths {net.hidden_widths}"
        )
