"""Compiled versus pure-Python kernels.

Times the inner placement scan over all slabs of the office scene and the
exhaustive reflect-vector enumeration at N = 3, checks that both backends
return identical results, and prints the speed-up.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from ris_secrecy import _kernels
from ris_secrecy.channel import FadingParams, LinkBudget, draw_channels, f_factors
from ris_secrecy.geometry import Scene, corner_distances, distance
from ris_secrecy.placement import PlacementGrid, _slab_heights


def scan_all(mod, scene, lb, grid):
    dsi_max, did_max = corner_distances(scene)
    n = scene.normals
    out = []
    for z in _slab_heights(scene, grid.delta_z):
        out.append(mod.inner_scan(
            float(z), scene.source, scene.destination, scene.eavesdropper,
            (scene.x_bounds, scene.y_bounds), tuple(n.beta1), tuple(n.beta2),
            scene.d_far, dsi_max, did_max, distance(scene.p_s, scene.p_d),
            grid.delta_d, lb.alpha_si, lb.alpha_id, True, True))
    return out


def enum(mod, n, seed=0):
    sc, lb = Scene.default(), LinkBudget.from_dbm(20.0)
    ch = draw_channels(n, FadingParams(), np.random.default_rng(seed))
    p = np.array([4.88, 4.92, 2.1])
    f1, f2, f3 = f_factors(p, lb, sc)
    amps = np.linspace(0.0, 1.0, 8)
    vals = (amps[:, None] * np.exp(2j * np.pi * np.arange(64) / 64)[None, :]).reshape(-1)
    return mod.enumerate_q(amps.astype(complex), vals, n, ch.h_sid, ch.h_sie,
                           lb.noise_var * f1, f2, f3)


def _same(a, b) -> bool:
    # objective values may differ in the last ulp (vectorised vs libm pow)
    if isinstance(a, (list, tuple)):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, float):
        return abs(a - b) <= 1e-12 * max(1.0, abs(a))
    return a == b


def best_of(fn, repeat):
    times, res = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        res = fn()
        times.append(time.perf_counter() - t0)
    return min(times), res


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _kernels.compiled is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation`")
        return 1
    sc, lb, grid = Scene.default(), LinkBudget(), PlacementGrid()
    cases = [
        ("inner scan, 31 slabs", lambda m: scan_all(m, sc, lb, grid)),
        ("enumerate q, N = 3 (2097152 points)", lambda m: enum(m, 3)),
    ]
    print(f"{'kernel':<38} {'python (s)':>11} {'compiled (s)':>13} {'speed-up':>9}  agree")
    for name, fn in cases:
        tp, rp = best_of(lambda: fn(_kernels.fallback), args.repeat)
        tc, rc = best_of(lambda: fn(_kernels.compiled), args.repeat)
        agree = _same(rp, rc)
        print(f"{name:<38} {tp:>11.4f} {tc:>13.4f} {tp / tc:>8.1f}x  {agree}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
