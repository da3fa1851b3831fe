"""Numba kernels vs their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

With ``HYDRA_AD_DISABLE_NUMBA=1`` only the numpy column is measured. Both
backends are checked for identical output before timing.
"""

from __future__ import annotations

import argparse
import json
import logging
import timeit

import numpy as np

from hydra_ad import _accel
from hydra_ad import pipeline as P
from hydra_ad.core import SubgroupLayout, TelemetrySlice
from hydra_ad.evaluation import point_adjust, trailing_mean
from hydra_ad.reduction import reduce_arrays
from hydra_ad.synth import generate_base
from hydra_ad.tdbscan import cluster_slice, dbscan_1d

logger = logging.getLogger("bench")


def _cases(rng):
    sizes = [63] * 32 + [62] * 32
    lay = SubgroupLayout.from_groups(sizes)
    C = lay.channel_count
    vals = rng.normal(100, 5, size=(2000, C))
    act = rng.random((2000, C)) > 0.02
    eps = np.full(lay.subgroup_count, 2.0)
    v1 = np.round(rng.normal(0, 1, 4000), 2)
    y = np.zeros(1_000_000, bool)
    for s in rng.integers(0, 999_000, size=2000):
        y[s : s + int(rng.integers(1, 200))] = True
    pred = rng.random(y.size) < 0.01
    x = rng.normal(size=1_000_000)
    xa = rng.random(x.size) > 0.001

    return {
        "reduce 2000x4000": lambda nb: reduce_arrays(vals, act, lay, use_numba=nb),
        "dbscan_1d n=4000": lambda nb: dbscan_1d(v1, 0.05, 4, use_numba=nb),
        "cluster_slice 4000ch": lambda nb: cluster_slice(vals[0], act[0], lay, eps, 2, use_numba=nb),
        "point_adjust 1e6": lambda nb: point_adjust(pred, y, use_numba=nb),
        "trailing_mean 1e6 w=50": lambda nb: trailing_mean(x, 50, xa, use_numba=nb),
    }


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.allclose(a, b, equal_nan=True, rtol=1e-12, atol=1e-12)


def _engine_case(rng):
    sizes = [63] * 32 + [62] * 32
    base = generate_base(64, sizes, sessions=1, session_length=800, seed=0)
    cfg = P.PipelineConfig.from_dict({"detector": {"window_n": 16}, "spot": {"q": 1e-3, "calibration_fraction": 1.0}})
    art = P.train_pipeline(cfg, base.dataset, base.layout)
    d = base.dataset
    slices = [TelemetrySlice(int(d.timestamps[i]), d.values[i], d.active[i]) for i in range(len(d))]

    def run(nb):
        _accel.USE_NUMBA = nb
        try:
            engine = P.DetectionEngine(art)
            for s in slices:
                engine.process(s)
        finally:
            _accel.USE_NUMBA = _accel.HAVE_NUMBA
        return len(slices)

    return run, len(slices)


def main(argv=None) -> dict:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", default=None)
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    rng = np.random.default_rng(0)
    backends = [False, True] if _accel.HAVE_NUMBA else [False]
    results = {}
    for name, fn in _cases(rng).items():
        outs = {nb: fn(nb) for nb in backends}  # also triggers compilation
        if len(outs) == 2 and not _same(outs[True], outs[False]):
            raise AssertionError(f"{name}: backends disagree")
        results[name] = {("numba" if nb else "numpy"): min(timeit.repeat(lambda: fn(nb), number=1, repeat=args.repeat)) for nb in backends}

    run, n = _engine_case(rng)
    for nb in backends:
        run(nb)
    results[f"engine per slice (x{n})"] = {
        ("numba" if nb else "numpy"): min(timeit.repeat(lambda: run(nb), number=1, repeat=max(1, args.repeat // 2))) / n for nb in backends
    }

    logger.info("%-28s %12s %12s %8s", "kernel", "numpy [ms]", "numba [ms]", "speedup")
    for name, r in results.items():
        npy, nba = r["numpy"] * 1e3, r.get("numba")
        if nba is None:
            logger.info("%-28s %12.3f %12s %8s", name, npy, "-", "-")
        else:
            logger.info("%-28s %12.3f %12.3f %7.1fx", name, npy, nba * 1e3, r["numpy"] / nba)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(results, fh, indent=1)
    return results


if __name__ == "__main__":
    main()
