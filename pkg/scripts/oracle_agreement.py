"""Compare every certifier mode and the lower bound against exact enumeration.

    python3 scripts/oracle_agreement.py --n 1000 --seed 0 [--out results.json]
"""

from __future__ import annotations

import argparse
import json
import time
from collections import Counter
from dataclasses import asdict, dataclass

import numpy as np

from projcert import CertifyConfig, Status, certified_lower_bound, certify, classify, enumerate_feasible_patterns
from projcert.network import is_adversarial
from projcert.oracle import exact_min_distortion
from projcert.suite import tiny_suite

MODES = {
    "vanilla": {},
    "full_queue": {"full_queue": True},
    "exact_fallback": {"exact_fallback": True},
}


@dataclass
class ExperimentConfig:
    n: int = 1000
    seed: int = 0
    max_neurons: int = 10


def run(cfg: ExperimentConfig) -> dict:
    suite = tiny_suite(cfg.n, cfg.seed, cfg.max_neurons)
    t0 = time.perf_counter()
    truth = [exact_min_distortion(i.net, i.x, enumerate_feasible_patterns(i.net)).distance for i in suite]
    summary = {"config": asdict(cfg), "oracle_seconds": time.perf_counter() - t0, "modes": {}}

    for name, kw in MODES.items():
        t0 = time.perf_counter()
        counts, unsound, disagree = Counter(), 0, 0
        for inst, d in zip(suite, truth):
            res = certify(inst.net, inst.x, CertifyConfig(inst.epsilon, **kw))
            counts[res.status.value] += 1
            robust = d > inst.epsilon
            if res.status is Status.ROBUST and not robust:
                unsound += 1
            if res.status is Status.NOT_ROBUST:
                w = res.witness
                ok = np.linalg.norm(inst.x - w) <= inst.epsilon + 1e-9 and is_adversarial(inst.net, w, classify(inst.net, inst.x))
                unsound += not ok
            if res.status in (Status.ROBUST, Status.NOT_ROBUST):
                disagree += (res.status is Status.ROBUST) != robust
        summary["modes"][name] = {
            "counts": dict(counts),
            "unsound": unsound,
            "disagree_with_oracle": disagree,
            "seconds": time.perf_counter() - t0,
        }

    invalid, tight, gaps = 0, 0, []
    for inst, d in zip(suite, truth):
        out = certified_lower_bound(inst.net, inst.x, inst.epsilon)
        invalid += out.bound > d + 1e-9
        if out.tight:
            tight += 1
            gaps.append(abs(out.bound - d))
    summary["lower_bound"] = {"invalid": invalid, "tight": tight, "max_tight_gap": max(gaps, default=0.0)}
    return summary


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-neurons", type=int, default=10)
    p.add_argument("--out", default=None)
    a = p.parse_args()
    summary = run(ExperimentConfig(a.n, a.seed, a.max_neurons))
    print(f"oracle: {summary['oracle_seconds']:.1f}s for {a.n} instances")
    for name, m in summary["modes"].items():
        print(f"{name:>15}: {m['counts']}  unsound={m['unsound']}  disagree={m['disagree_with_oracle']}  {m['seconds']:.1f}s")
    lb = summary["lower_bound"]
    print(f"{'lower bound':>15}: invalid={lb['invalid']}  tight={lb['tight']}  max tight gap={lb['max_tight_gap']:.2e}")
    if a.out:
        with open(a.out, "w") as fh:
            json.dump(summary, fh, indent=1)


if __name__ == "__main__":
    main()
