"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--scale 1.0]

Prints one row per kernel with the best wall time of each backend, the
speed-up, and whether the two outputs are bitwise identical.
"""

import argparse
import time

import numpy as np

from esec import kernels
from esec.chain import PERMUTATIONS, draw_sample, load_table
from esec.dynamic import DynamicConfig
from esec.static import StaticConfig


def _inputs(scale: float):
    rng = np.random.default_rng(0)
    n = int(200_000 * scale)
    lo_a = rng.uniform(-0.5, 0.5, (n, 3))
    lo_b = rng.uniform(-0.5, 0.5, (n, 3))
    static = (lo_a, lo_a + rng.uniform(0.01, 0.3, (n, 3)), lo_b, lo_b + rng.uniform(0.01, 0.3, (n, 3)))
    s, d = StaticConfig(), DynamicConfig()
    centers = [rng.uniform(-0.3, 0.3, (n, 3)) for _ in range(4)]
    dynamic = (*centers, rng.random(n) < 0.3, rng.random(n) < 0.3, rng.uniform(0, 0.3, n),
               d.xi, d.stable_eps, d.far_threshold, d.move_eps)
    m = int(600 * scale)
    query = rng.integers(0, 6, (12, 3, 10)).astype(np.int8)
    refs = rng.integers(0, 6, (m, 16, 3, 10)).astype(np.int8)
    lengths = rng.integers(1, 17, m)
    table = load_table()
    samples = np.stack([draw_sample(table, 0, b) for b in range(int(2000 * scale))])
    dur = samples[:, PERMUTATIONS, 0].reshape(-1, 5)
    pred = samples[:, PERMUTATIONS, 1].reshape(-1, 5)
    return {
        "static_codes": (kernels.static_codes, (*static, s.eps_touch, s.null_radius, s.around_radius)),
        "dynamic_codes": (kernels.dynamic_codes, dynamic),
        "diff_counts": (kernels.diff_counts, (query, refs, lengths)),
        "chain_completion": (kernels.chain_completion, (dur, pred)),
    }


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(np.array_equal(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--scale", type=float, default=1.0, help="multiplies every problem size")
    args = ap.parse_args()

    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the numpy fallback is available")
    print(f"{'kernel':<18}" + "".join(f"{b + ' [ms]':>14}" for b in backends) + f"{'speed-up':>10}  identical")
    for name, (fn, fargs) in _inputs(args.scale).items():
        best, outs = {}, {}
        for b in backends:
            with kernels.use_backend(b):
                outs[b] = fn(*fargs)
                times = []
                for _ in range(args.repeat):
                    t0 = time.perf_counter()
                    fn(*fargs)
                    times.append(time.perf_counter() - t0)
            best[b] = min(times) * 1e3
        speed = best["numpy"] / best["cython"] if "cython" in best else float("nan")
        same = all(_same(outs["numpy"], o) for o in outs.values())
        print(f"{name:<18}" + "".join(f"{best[b]:14.2f}" for b in backends) + f"{speed:10.1f}  {same}")


if __name__ == "__main__":
    main()
