"""Seeded collections of tiny certification instances for oracle comparisons."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fixtures import FixtureSpec, generate_fixture
from .network import Network


@dataclass(frozen=True)
class Instance:
    spec: FixtureSpec
    net: Network
    x: np.ndarray
    epsilon: float


def random_hidden(rng: np.random.Generator, max_neurons: int = 10) -> tuple[int, ...]:
    depth = int(rng.integers(1, 4))
    widths = []
    left = max_neurons
    for _ in range(depth):
        if left < 1:
            break
        w = int(rng.integers(1, min(6, left) + 1))
        widths.append(w)
        left -= w
    return tuple(widths)


def tiny_suite(n: int = 1000, seed: int = 0, max_neurons: int = 10) -> list[Instance]:
    """Nets with 2-3 inputs, at most ``max_neurons`` hidden units and 2-3 classes.

    Query points are uniform in [-1, 1]^m and radii uniform in [0.01, 1].
    """
    rng = np.random.default_rng(seed)
    out = []
    for k in range(n):
        spec = FixtureSpec(
            input_dim=int(rng.integers(2, 4)),
            hidden=random_hidden(rng, max_neurons),
            num_classes=int(rng.integers(2, 4)),
            seed=int(seed * 1_000_003 + k),
            scale=1.0,
        )
        net = generate_fixture(spec)
        x = rng.uniform(-1.0, 1.0, size=spec.input_dim)
        eps = float(rng.uniform(0.01, 1.0))
        out.append(Instance(spec, net, x, eps))
    return out
