"""Experiment configuration read from TOML.

Every table and key is optional; anything missing takes the default office
scene and link budget. Schema::

    [scene]        source, destination, eavesdropper, room, obstacle_ll,
                   obstacle_ul, obstacle_lr, obstacle_ur (3-vectors, m),
                   x_bounds, y_bounds, z_bounds ([min, max], m), d_far (m)
    [link]         ps_dbm, noise_dbm, xi0, alpha_si, alpha_id, alpha_ie
    [fading]       k_si, k_id, k_ie, var_si, var_id, var_ie
    [placement]    delta_z, delta_d, anchor ("far" | "lower"),
                   tie_break ("last" | "first")
    [srocr]        xi1, xi2, delta0, max_iter, solver_tol, randomization_samples
    [experiment]   n, scheme, trials, candidate_grid_step, base_seed,
                   random_locations, location_mode ("round-robin" | "all"),
                   degradation_threshold
"""
from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from ..beamforming import SrocrParams
from ..channel import FadingParams, LinkBudget, dbm_to_watts
from ..geometry import Scene
from ..placement import PlacementGrid

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

SCHEMES = ("JLPB", "NSB", "NDB", "RANDOM")
WORKERS_ENV = "RIS_SECRECY_WORKERS"


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    scene: Scene = field(default_factory=Scene.default)
    ps_dbm: float = 10.0
    noise_dbm: float = -40.0
    xi0: float = 1e-3
    alpha_si: float = 2.2
    alpha_id: float = 2.2
    alpha_ie: float = 2.2
    fading: FadingParams = FadingParams()
    n: int = 16
    grid: PlacementGrid = PlacementGrid()
    srocr: SrocrParams = SrocrParams()
    scheme: str = "JLPB"
    trials: int = 200
    candidate_grid_step: float = 0.1
    base_seed: int = 2024
    random_locations: int = 10
    location_mode: str = "round-robin"
    degradation_threshold: float = 0.05
    source: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not self.candidate_grid_step > 0:
            raise ValueError("candidate_grid_step must be positive")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if self.location_mode not in ("round-robin", "all"):
            raise ValueError("location_mode must be 'round-robin' or 'all'")
        if not 0.0 <= self.degradation_threshold <= 1.0:
            raise ValueError("degradation_threshold must lie in [0, 1]")
        if self.random_locations < 1:
            raise ValueError("random_locations must be at least 1")

    @property
    def link(self) -> LinkBudget:
        return LinkBudget(dbm_to_watts(self.ps_dbm), dbm_to_watts(self.noise_dbm), self.xi0,
                          self.alpha_si, self.alpha_id, self.alpha_ie)

    def with_(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)


def _subset(cls, table: dict, section: str):
    known = {f.name for f in fields(cls)}
    extra = set(table) - known
    if extra:
        raise ValueError(f"unknown keys in [{section}]: {sorted(extra)}")
    return table


def scene_from_table(table: dict) -> Scene:
    base = Scene.default()
    _subset(Scene, table, "scene")
    vals = {f.name: getattr(base, f.name) for f in fields(Scene)}
    vals.update({k: tuple(v) if isinstance(v, list) else v for k, v in table.items()})
    return Scene(**vals)


def config_from_dict(doc: dict, source: str | None = None) -> ExperimentConfig:
    unknown = set(doc) - {"scene", "link", "fading", "placement", "srocr", "experiment"}
    if unknown:
        raise ValueError(f"unknown sections: {sorted(unknown)}")
    kw = {"source": source}
    kw["scene"] = scene_from_table(doc.get("scene", {}))
    link = dict(doc.get("link", {}))
    link_keys = {"ps_dbm", "noise_dbm", "xi0", "alpha_si", "alpha_id", "alpha_ie"}
    if set(link) - link_keys:
        raise ValueError(f"unknown keys in [link]: {sorted(set(link) - link_keys)}")
    kw.update(link)
    kw["fading"] = FadingParams(**_subset(FadingParams, doc.get("fading", {}), "fading"))
    kw["grid"] = PlacementGrid(**_subset(PlacementGrid, doc.get("placement", {}), "placement"))
    kw["srocr"] = SrocrParams(**_subset(SrocrParams, doc.get("srocr", {}), "srocr"))
    exp = dict(doc.get("experiment", {}))
    exp_keys = {"n", "scheme", "trials", "candidate_grid_step", "base_seed",
                "random_locations", "location_mode", "degradation_threshold"}
    if set(exp) - exp_keys:
        raise ValueError(f"unknown keys in [experiment]: {sorted(set(exp) - exp_keys)}")
    kw.update(exp)
    return ExperimentConfig(**kw)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    with path.open("rb") as fh:
        doc = tomllib.load(fh)
    return config_from_dict(doc, str(path))
