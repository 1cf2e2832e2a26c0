"""Benchmark schemes, Monte-Carlo runs and parameter sweeps.

Seeding: trial ``i`` draws its channels from ``default_rng([base_seed, 0, i])``,
so every scheme and every sweep value sees the same fading realisations
(common random numbers). Random RIS locations come from
``default_rng([base_seed, 1])``.

Schemes with several locations (NSB, NDB, RANDOM) assign trial ``i`` to
location ``i mod L`` by default ("round-robin"); ``location_mode = "all"``
runs every trial at every location instead.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..beamforming import optimize_beamforming
from ..channel import draw_channels
from ..geometry import Scene, feasible_mask
from ..placement import PlacementGrid, box_grid, outer_optimize
from .config import SCHEMES, ExperimentConfig, worker_count

AXES = ("Ps", "N", "x_max", "y_max", "z_max")
SCHEME_LABELS = {"JLPB": "J-LPB", "NSB": "NSB-LPB", "NDB": "NDB-LPB", "RANDOM": "R-LPB"}


class InfeasibleSceneError(RuntimeError):
    """No feasible RIS location exists for the requested scheme."""


@lru_cache(maxsize=64)
def _candidates_cached(scene: Scene, step: float) -> np.ndarray:
    pts = box_grid(scene, step)
    out = pts[feasible_mask(pts, scene)]
    out.setflags(write=False)
    return out


def candidate_locations(scene: Scene, step: float) -> np.ndarray:
    """Feasible points of the uniform grid over the bounds box, (M, 3)."""
    return _candidates_cached(scene, float(step))


@lru_cache(maxsize=64)
def _placement_cached(scene: Scene, alpha_si: float, alpha_id: float, grid: PlacementGrid):
    from ..channel import LinkBudget
    return outer_optimize(scene, LinkBudget(alpha_si=alpha_si, alpha_id=alpha_id), grid)


def select_scheme_location(scheme: str, scene: Scene, lb, grid: PlacementGrid,
                           candidates, rng: np.random.Generator | None = None,
                           n_random: int = 10) -> np.ndarray:
    """RIS locations used by ``scheme`` as an (L, 3) array."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    if scheme == "JLPB":
        res = _placement_cached(scene, lb.alpha_si, lb.alpha_id, grid)
        if not res.feasible:
            raise InfeasibleSceneError("two-tier search found no feasible location")
        return res.p_opt[None, :].copy()
    cand = np.asarray(candidates, dtype=float).reshape(-1, 3)
    if cand.shape[0] == 0:
        raise InfeasibleSceneError(f"{scheme}: empty candidate population")
    if scheme == "RANDOM":
        gen = rng if rng is not None else np.random.default_rng(0)
        replace = cand.shape[0] < n_random
        return cand[gen.choice(cand.shape[0], n_random, replace=replace)]
    k = max(1, math.ceil(0.001 * cand.shape[0]))
    ref = scene.p_s if scheme == "NSB" else scene.p_d
    d = np.linalg.norm(cand - ref, axis=1)
    return cand[np.argsort(d, kind="stable")[:k]]


@dataclass
class SchemeStats:
    scheme: str
    mean: float
    stderr: float
    rates: np.ndarray
    locations: np.ndarray
    degraded: int
    n_trials: int

    @property
    def degraded_fraction(self) -> float:
        return self.degraded / max(1, self.rates.size)


def _trial_jobs(cfg: ExperimentConfig, locations: np.ndarray):
    L = locations.shape[0]
    if cfg.location_mode == "all":
        return [(i, j) for i in range(cfg.trials) for j in range(L)]
    return [(i, i % L) for i in range(cfg.trials)]


def _run_chunk(args):
    cfg, locations, jobs = args
    lb = cfg.link
    out = []
    for i, j in jobs:
        rng = np.random.default_rng([cfg.base_seed, 0, i])
        ch = draw_channels(cfg.n, cfg.fading, rng)
        res = optimize_beamforming(ch, locations[j], cfg.scene, lb, cfg.srocr, rng=rng)
        out.append((res.rate, res.degraded))
    return out


def _run_jobs(cfg, locations, jobs, workers):
    if workers <= 1 or len(jobs) < 2:
        return _run_chunk((cfg, locations, jobs))
    size = math.ceil(len(jobs) / workers)
    chunks = [jobs[k:k + size] for k in range(0, len(jobs), size)]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(_run_chunk, [(cfg, locations, c) for c in chunks]))
    return [r for part in parts for r in part]


_RUN_CACHE: dict = {}


def _locations_for(cfg: ExperimentConfig, scheme: str) -> np.ndarray:
    cands = None
    if scheme != "JLPB":
        cands = candidate_locations(cfg.scene, cfg.candidate_grid_step)
    rng = np.random.default_rng([cfg.base_seed, 1])
    return select_scheme_location(scheme, cfg.scene, cfg.link, cfg.grid, cands, rng,
                                  cfg.random_locations)


def run_scheme(cfg: ExperimentConfig, scheme: str | None = None,
               workers: int | None = None) -> SchemeStats:
    """Average secrecy rate of one scheme over ``cfg.trials`` fading draws."""
    scheme = cfg.scheme if scheme is None else scheme
    locations = _locations_for(cfg, scheme)
    # runs depend on the scene only through the chosen locations
    key = (scheme, locations.tobytes(), cfg.with_(scene=Scene.default(), source=None, scheme="JLPB"),
           cfg.scene.source, cfg.scene.destination, cfg.scene.eavesdropper)
    if key not in _RUN_CACHE:
        jobs = _trial_jobs(cfg, locations)
        results = _run_jobs(cfg, locations, jobs, worker_count() if workers is None else workers)
        rates = np.array([r for r, _ in results])
        degraded = int(sum(d for _, d in results))
        _RUN_CACHE[key] = (rates, degraded)
    rates, degraded = _RUN_CACHE[key]
    n = rates.size
    se = float(np.std(rates, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return SchemeStats(scheme, float(np.mean(rates)), se, rates.copy(), locations, degraded,
                       cfg.trials)


def clear_caches() -> None:
    _RUN_CACHE.clear()
    _candidates_cached.cache_clear()
    _placement_cached.cache_clear()


# --- sweeps ------------------------------------------------------------------

@dataclass
class SweepRow:
    value: float
    scheme: str
    mean: float
    stderr: float
    n_trials: int
    seed: int
    locations: np.ndarray = field(repr=False)
    degraded: int = 0


@dataclass
class SweepResult:
    axis: str
    values: list
    rows: list
    trials: int
    seed: int

    def stats(self, scheme: str) -> list[SweepRow]:
        return [r for r in self.rows if r.scheme == scheme]

    @property
    def degraded_fraction(self) -> float:
        total = sum(r.n_trials for r in self.rows)
        return sum(r.degraded for r in self.rows) / max(1, total)


def config_at(cfg: ExperimentConfig, axis: str, value: float) -> ExperimentConfig:
    """Copy of ``cfg`` with one sweep axis set to ``value``."""
    sc = cfg.scene
    if axis == "Ps":
        return cfg.with_(ps_dbm=float(value))
    if axis == "N":
        if int(value) != value:
            raise ValueError("N must be an integer")
        return cfg.with_(n=int(value))
    if axis == "x_max":
        return cfg.with_(scene=sc.with_bounds(x=(sc.x_bounds[0], float(value))))
    if axis == "y_max":
        return cfg.with_(scene=sc.with_bounds(y=(sc.y_bounds[0], float(value))))
    if axis == "z_max":
        return cfg.with_(scene=sc.with_bounds(z=(sc.z_bounds[0], float(value))))
    raise ValueError(f"unknown axis {axis!r}; expected one of {AXES}")


def sweep(cfg: ExperimentConfig, axis: str, values, schemes=("JLPB",),
          workers: int | None = None) -> SweepResult:
    values = [float(v) for v in values]
    if not values:
        raise ValueError("sweep needs at least one value")
    if any(b < a for a, b in zip(values, values[1:])):
        raise ValueError("sweep values must be ascending")
    for s in schemes:
        if s not in SCHEMES:
            raise ValueError(f"unknown scheme {s!r}")
    rows = []
    for v in values:
        c = config_at(cfg, axis, v)
        for s in schemes:
            st = run_scheme(c, s, workers)
            rows.append(SweepRow(v, s, st.mean, st.stderr, st.rates.size, cfg.base_seed,
                                 st.locations, st.degraded))
    return SweepResult(axis, values, rows, cfg.trials, cfg.base_seed)
