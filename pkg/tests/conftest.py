import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from projcert.fixtures import FixtureSpec, generate_fixture, h1_network
from projcert.network import LinearLayer, Network

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def h1():
    return h1_network()


@pytest.fixture
def x0():
    return np.array([0.5, 0.2])


def random_net(seed, input_dim=2, hidden=(4, 4), num_classes=3, scale=1.0):
    return generate_fixture(FixtureSpec(input_dim, hidden, num_classes, seed, scale))


def biased_away_from_boundary(seed=0):
    """10-input net whose class 0 wins by a wide margin around the origin."""
    net = random_net(seed, 10, (20, 20), 3)
    top = net.layers[-1]
    return Network(net.layers[:-1] + (LinearLayer(top.weights, top.bias + np.array([100.0, 0, 0])),))


def naive_forward(net, x):
    """Layer-by-layer evaluation with plain Python lists."""
    h = [float(v) for v in x]
    pre = []
    for k, layer in enumerate(net.layers):
        W = layer.weights.tolist()
        b = layer.bias.tolist()
        z = [sum(W[i][j] * h[j] for j in range(len(h))) + b[i] for i in range(len(b))]
        if k == len(net.layers) - 1:
            return z, pre
        pre.append(z)
        h = [max(v, 0.0) for v in z]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
