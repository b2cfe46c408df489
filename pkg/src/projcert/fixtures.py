"""Deterministic synthetic networks and small hand-built geometry cases."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .network import Network


@dataclass(frozen=True)
class FixtureSpec:
    input_dim: int
    hidden: tuple[int, ...] = field(default_factory=tuple)
    num_classes: int = 2
    seed: int = 0
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if self.input_dim < 1 or self.num_classes < 1 or any(h < 1 for h in self.hidden):
            raise ValueError(f"invalid fixture dimensions: {self}")
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "FixtureSpec":
        known = {"input_dim", "hidden", "num_classes", "seed", "scale"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown fixture fields: {sorted(extra)}")
        return cls(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hidden"] = list(self.hidden)
        return d


def generate_fixture(spec: FixtureSpec) -> Network:
    """Weights and biases drawn i.i.d. uniform in [-scale, scale] from ``spec.seed``."""
    rng = np.random.default_rng(spec.seed)
    dims = [spec.input_dim, *spec.hidden, spec.num_classes]
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        weights.append(rng.uniform(-spec.scale, spec.scale, size=(fan_out, fan_in)))
        biases.append(rng.uniform(-spec.scale, spec.scale, size=fan_out))
    return Network.from_arrays(weights, biases)


def h1_network() -> Network:
    """Identity hidden layer; class 0 scores h1 - h2, class 1 scores h2 - h1."""
    return Network.from_arrays(
        [np.eye(2), np.array([[1.0, -1.0], [-1.0, 1.0]])],
        [np.zeros(2), np.zeros(2)],
    )


def wedge_network(shift: float) -> Network:
    """Two-class 2-D net with margin ``shift - x1 + relu(x2)``.

    Above the x1-axis the decision line is ``x2 = x1 - shift``; below it the
    line turns vertical at ``x1 = shift``. The large first-unit bias keeps that
    unit active everywhere near the origin so it only passes ``x1`` through.
    """
    return Network.from_arrays(
        [np.eye(2), np.array([[-1.0, 1.0], [0.0, 0.0]])],
        [np.array([10.0, 0.0]), np.array([10.0 + shift, 0.0])],
    )


# (network, point, epsilon) for the three projection cases: the nearest boundary
# point lies inside the region; lies outside but the boundary still meets the
# region inside the ball; lies outside and the boundary misses the region
# inside the ball.
def projection_cases() -> dict[str, tuple[Network, np.ndarray, float]]:
    x = np.array([0.0, 0.5])
    return {
        "left": (wedge_network(0.2), x, 0.6),
        "center": (wedge_network(0.6), x, 1.0),
        "right": (wedge_network(1.5), x, 1.45),
    }
