"""Command-line entry point: ``projcert {certify,lower-bound,oracle,gen-fixture}``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import records
from .certifier import CertifyConfig, certify
from .fixtures import FixtureSpec, generate_fixture
from .lower_bound import LowerBoundConfig, certified_lower_bound
from .network import ModelError
from .oracle import CapacityError, enumerate_feasible_patterns, exact_min_distortion
from .serialization import ModelFormatError, load_inputs, load_model, save_inputs, save_model

log = logging.getLogger("projcert")


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not (np.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"must be a positive finite number, got {text}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="projcert", description="l2 robustness certification by region search")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--model", required=True, type=Path)
        sp.add_argument("--inputs", required=True, type=Path)
        sp.add_argument("--jobs", type=_positive_int, default=os.cpu_count() or 1)

    c = sub.add_parser("certify", help="decide robustness within an epsilon-ball")
    common(c)
    c.add_argument("--epsilon", required=True, type=_positive_float)
    c.add_argument("--full-queue", action="store_true")
    c.add_argument("--exact-fallback", action="store_true")
    c.add_argument("--batch-size", type=_positive_int, default=32)
    c.add_argument("--timeout-ms", type=_positive_float, default=None)
    c.add_argument("--max-regions", type=_positive_int, default=None)

    lb = sub.add_parser("lower-bound", help="certified lower bound on minimal distortion")
    common(lb)
    lb.add_argument("--epsilon-max", required=True, type=_positive_float)
    lb.add_argument("--timeout-ms", type=_positive_float, default=None)
    lb.add_argument("--max-regions", type=_positive_int, default=None)

    o = sub.add_parser("oracle", help="exact minimal distortion by enumeration (small nets only)")
    common(o)
    o.add_argument("--epsilon", type=_positive_float, default=None)

    g = sub.add_parser("gen-fixture", help="write a random network from a fixture spec")
    g.add_argument("--spec", required=True, help="JSON object or path to a JSON file")
    g.add_argument("--out", required=True, type=Path)
    g.add_argument("--num-inputs", type=_positive_int, default=None, help="also write random inputs")
    g.add_argument("--inputs-out", type=Path, default=None)
    g.add_argument("--input-range", type=_positive_float, default=1.0)
    return p


def _read_spec(text: str) -> FixtureSpec:
    path = Path(text)
    raw = path.read_text() if not text.lstrip().startswith("{") and path.exists() else text
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"--spec is neither a JSON object nor a readable JSON file ({exc.msg})") from exc
    if not isinstance(doc, dict):
        raise ModelFormatError("--spec must be a JSON object")
    try:
        return FixtureSpec.from_dict(doc)
    except TypeError as exc:
        raise ModelFormatError(f"--spec: {exc}") from exc


def _map(fn, items, jobs):
    if jobs <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _emit(recs, out):
    for r in recs:
        out.write(records.dumps(r) + "\n")
    out.flush()


def _run(args, out) -> int:
    if args.command == "gen-fixture":
        spec = _read_spec(args.spec)
        net = generate_fixture(spec)
        save_model(net, args.out)
        if args.num_inputs:
            if args.inputs_out is None:
                raise ModelFormatError("--num-inputs requires --inputs-out")
            rng = np.random.default_rng(spec.seed + 1)
            pts = rng.uniform(-args.input_range, args.input_range, size=(args.num_inputs, spec.input_dim))
            save_inputs(pts, args.inputs_out)
        log.info("wrote %s", args.out)
        return 0

    net = load_model(args.model)
    inputs = load_inputs(args.inputs, net.input_dim)
    indexed = list(enumerate(inputs))

    if args.command == "certify":
        cfg = CertifyConfig(
            epsilon=args.epsilon,
            full_queue=args.full_queue,
            exact_fallback=args.exact_fallback,
            batch_size=args.batch_size,
            timeout=None if args.timeout_ms is None else args.timeout_ms / 1e3,
            max_regions=args.max_regions,
        )
        recs = _map(lambda t: records.certify_record(t[0], cfg.epsilon, certify(net, t[1], cfg)), indexed, args.jobs)
    elif args.command == "lower-bound":
        cfg = LowerBoundConfig(
            timeout=None if args.timeout_ms is None else args.timeout_ms / 1e3,
            max_regions=args.max_regions,
        )
        recs = _map(
            lambda t: records.lower_bound_record(t[0], args.epsilon_max, certified_lower_bound(net, t[1], args.epsilon_max, cfg)),
            indexed,
            args.jobs,
        )
    else:
        catalog = enumerate_feasible_patterns(net)

        def one(t):
            t0 = time.perf_counter()
            d = exact_min_distortion(net, t[1], catalog)
            return records.oracle_record(t[0], d, args.epsilon, time.perf_counter() - t0)

        recs = _map(one, indexed, args.jobs)
    _emit(recs, out)
    return 0


def run_cli(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return _run(args, out)
    except (OSError, ModelFormatError, ModelError, CapacityError, ValueError) as exc:
        print(f"projcert: error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
