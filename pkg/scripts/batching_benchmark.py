"""Wall-clock of the certifier against the activation dequeue batch size.

Uses a random 784-input network with three hidden layers of 40 units.

    python3 scripts/batching_benchmark.py --epsilon 0.05 --batch-sizes 1 8 32 64 --repeats 3
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass, field

import numpy as np

from projcert import CertifyConfig, FixtureSpec, certify, generate_fixture


@dataclass
class BenchConfig:
    epsilon: float = 0.05
    batch_sizes: list[int] = field(default_factory=lambda: [1, 8, 16, 32, 64])
    repeats: int = 3
    seed: int = 3
    input_seed: int = 0
    full_queue: bool = True
    max_regions: int | None = 5000


def run(cfg: BenchConfig) -> list[dict]:
    net = generate_fixture(FixtureSpec(784, (40, 40, 40), 10, seed=cfg.seed))
    x = np.random.default_rng(cfg.input_seed).uniform(0.0, 1.0, 784)
    rows = []
    for b in cfg.batch_sizes:
        conf = CertifyConfig(cfg.epsilon, full_queue=cfg.full_queue, batch_size=b, max_regions=cfg.max_regions)
        times = []
        for _ in range(cfg.repeats):
            t0 = time.perf_counter()
            res = certify(net, x, conf)
            times.append(time.perf_counter() - t0)
        rows.append({"batch_size": b, "status": res.status.value, "regions": res.stats.regions_visited,
                     "median_s": float(np.median(times))})
    return rows


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--batch-sizes", type=int, nargs="+", default=[1, 8, 16, 32, 64])
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=3)
    a = p.parse_args()
    rows = run(BenchConfig(a.epsilon, a.batch_sizes, a.repeats, a.seed))
    base = rows[0]["median_s"]
    for r in rows:
        print(f"batch {r['batch_size']:>3}: {r['status']:<10} {r['regions']:>5} regions  "
              f"{r['median_s']:.3f}s  x{base / r['median_s']:.2f}")


if __name__ == "__main__":
    main()
