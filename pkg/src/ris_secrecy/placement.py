"""RIS placement: a two-tier search in distance space and a brute-force grid oracle.

The objective is ``g(p) = |p - S|**a_si * |p - D|**a_id``, minimised over the
feasible region (bounds, far field from S/D/E, both LOS half-space tests).
The outer tier sweeps horizontal slabs ``z_j``; the inner tier walks a lattice
of (d_SI, d_ID) pairs and recovers the two candidate points on each slab by
intersecting the circles of radius d_SI about S and d_ID about D.

Lattice conventions (see ``PlacementGrid``):

* d_SI takes the values ``d_f + k * delta_d``.
* d_ID is anchored at ``d_f`` by default (``d_f + l * delta_d`` restricted to
  ``>= max(|d_SD - d_SI|, d_f)``), so every d_SI row shares one lattice. The
  alternative ``anchor="lower"`` restarts the lattice at the lower bound.
* Selection compares the lattice value ``d_SI**a_si * d_ID**a_id`` so that
  candidates on the same pair of shells tie exactly; ``g_opt`` in the result
  is recomputed from the coordinates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .channel import LinkBudget
from .geometry import Scene, corner_distances, distance, feasible_mask

_TIE_RULES = ("last", "first")
_ANCHORS = ("far", "lower")


@dataclass(frozen=True)
class PlacementGrid:
    """Slab spacing, distance-lattice spacing and the scan conventions."""

    delta_z: float = 0.1
    delta_d: float = 0.1
    anchor: str = "far"
    tie_break: str = "last"

    def __post_init__(self):
        if not (self.delta_z > 0 and self.delta_d > 0):
            raise ValueError("grid steps must be positive")
        if self.anchor not in _ANCHORS:
            raise ValueError(f"anchor must be one of {_ANCHORS}")
        if self.tie_break not in _TIE_RULES:
            raise ValueError(f"tie_break must be one of {_TIE_RULES}")


@dataclass
class PlacementResult:
    p_opt: np.ndarray
    g_opt: float
    feasible: bool
    inner_evals: int = 0
    candidates_checked: int = 0
    lattice_g: float = math.inf
    slab_results: list = field(default_factory=list, repr=False)

    @classmethod
    def infeasible(cls, inner_evals=0, candidates_checked=0) -> "PlacementResult":
        return cls(np.zeros(3), math.inf, False, inner_evals, candidates_checked)


@dataclass(frozen=True)
class ComplexityEstimate:
    """Operation-count model of the two-tier search.

    ``K1``..``K3`` are the closed-form approximations for the three d_SI
    ranges; ``K_exact`` is the corresponding floor sum.
    """

    K1: float
    K2: float
    K3: float
    K: float
    M1: float
    M2: float
    total: float
    K_exact: float
    greedy_total: float


def objective_g(p_i, scene: Scene, lb: LinkBudget) -> float:
    return (distance(p_i, scene.p_s) ** lb.alpha_si) * (distance(p_i, scene.p_d) ** lb.alpha_id)


def _slab_heights(scene: Scene, delta_z: float) -> np.ndarray:
    # slabs are anchored at the floor so that raising z_max only appends slabs
    n = _kernels.lattice_size(0.0, scene.z_bounds[1], delta_z)
    z = np.arange(n) * delta_z
    z = z[z >= scene.z_bounds[0] - 1e-12]
    return np.clip(z, scene.z_bounds[0], scene.z_bounds[1])


def inner_optimize(z_j: float, scene: Scene, lb: LinkBudget,
                   grid: PlacementGrid = PlacementGrid()) -> PlacementResult:
    """Best lattice candidate on the slab at height ``z_j``."""
    z_j = float(z_j)
    if not (scene.z_bounds[0] - 1e-12 <= z_j <= scene.z_bounds[1] + 1e-12):
        return PlacementResult.infeasible()
    z_j = min(max(z_j, scene.z_bounds[0]), scene.z_bounds[1])
    dsi_max, did_max = corner_distances(scene)
    n = scene.normals
    found, g_lat, x, y, pairs, cands = _kernels.inner_scan(
        z_j, scene.source, scene.destination, scene.eavesdropper,
        (scene.x_bounds, scene.y_bounds), tuple(n.beta1), tuple(n.beta2),
        scene.d_far, dsi_max, did_max, distance(scene.p_s, scene.p_d),
        grid.delta_d, lb.alpha_si, lb.alpha_id,
        grid.anchor == "far", grid.tie_break == "last")
    if not found:
        return PlacementResult.infeasible(int(pairs), int(cands))
    p = np.array([x, y, z_j])
    return PlacementResult(p, objective_g(p, scene, lb), True, int(pairs), int(cands), float(g_lat))


def outer_optimize(scene: Scene, lb: LinkBudget,
                   grid: PlacementGrid = PlacementGrid()) -> PlacementResult:
    """Sweep all slabs and keep the best one (ties resolved by ``grid.tie_break``)."""
    best = None
    evals = cands = 0
    slabs = []
    last = grid.tie_break == "last"
    for z in _slab_heights(scene, grid.delta_z):
        r = inner_optimize(z, scene, lb, grid)
        evals += r.inner_evals
        cands += r.candidates_checked
        slabs.append((float(z), r.lattice_g if r.feasible else math.inf))
        if not r.feasible:
            continue
        if best is None or r.lattice_g < best.lattice_g or (last and r.lattice_g == best.lattice_g):
            best = r
    if best is None:
        out = PlacementResult.infeasible(evals, cands)
    else:
        out = PlacementResult(best.p_opt, best.g_opt, True, evals, cands, best.lattice_g)
    out.slab_results = slabs
    return out


def grid_axes(scene: Scene, step: float) -> list[np.ndarray]:
    """Uniform grid coordinates lo + k*step over each bounds interval."""
    if not step > 0:
        raise ValueError("step must be positive")
    axes = [lo + np.arange(_kernels.lattice_size(lo, hi, step)) * step
            for lo, hi in (scene.x_bounds, scene.y_bounds, scene.z_bounds)]
    return [np.minimum(a, hi) for a, (lo, hi) in zip(axes, scene.bounds)]


def box_grid(scene: Scene, step: float) -> np.ndarray:
    """All grid points of the bounds box as an (M, 3) array, x slowest."""
    ax = grid_axes(scene, step)
    return np.stack(np.meshgrid(*ax, indexing="ij"), axis=-1).reshape(-1, 3)


def brute_force_placement(scene: Scene, lb: LinkBudget, step: float,
                          chunk: int = 200_000) -> PlacementResult:
    """Exhaustive search on the uniform x, y, z grid of the bounds box."""
    axes = grid_axes(scene, step)
    shape = tuple(a.size for a in axes)
    total = int(np.prod(shape))
    best_g, best_p = math.inf, None
    for start in range(0, total, chunk):
        idx = np.unravel_index(np.arange(start, min(total, start + chunk)), shape)
        pts = np.column_stack([axes[0][idx[0]], axes[1][idx[1]], axes[2][idx[2]]])
        ok = feasible_mask(pts, scene)
        if not ok.any():
            continue
        pts = pts[ok]
        g = (np.linalg.norm(pts - scene.p_s, axis=1) ** lb.alpha_si
             * np.linalg.norm(pts - scene.p_d, axis=1) ** lb.alpha_id)
        i = int(np.argmin(g))
        if g[i] < best_g:
            best_g, best_p = float(g[i]), pts[i].copy()
    if best_p is None:
        return PlacementResult.infeasible(total, total)
    return PlacementResult(best_p, objective_g(best_p, scene, lb), True, total, total, best_g)


def predict_complexity(scene: Scene, grid: PlacementGrid = PlacementGrid(),
                       M1: float = 1.0, M2: float = 1.0) -> ComplexityEstimate:
    """Approximate operation counts of the inner and outer tiers."""
    dsi_max, did_max = corner_distances(scene)
    dsd = distance(scene.p_s, scene.p_d)
    d_f, dd = scene.d_far, grid.delta_d
    c = M1 / dd**2
    k1 = c * (dsd * did_max - dsd**2 / 2.0)
    k2 = 2.0 * c * d_f * did_max
    k3 = c * (did_max * dsi_max - dsd * did_max + dsd**2 / 2.0 - dsi_max**2 / 2.0)
    k = k1 + k2 + k3

    fl = math.floor
    exact = 0.0
    for kk in range(0, fl((dsd - 2 * d_f) / dd) + 1):
        exact += fl((did_max - (dsd - d_f - kk * dd)) / dd)
    for kk in range(math.ceil((dsd - 2 * d_f) / dd), fl(dsd / dd) + 1):
        exact += fl((did_max - d_f) / dd)
    for kk in range(math.ceil(dsd / dd), fl((dsi_max - d_f) / dd) + 1):
        exact += fl((did_max + (dsd - d_f - kk * dd)) / dd)
    exact *= M1

    slabs = scene.z_bounds[1] / grid.delta_z
    return ComplexityEstimate(k1, k2, k3, k, M1, M2, slabs * (k + M2), exact,
                              slabs * (c * did_max * dsi_max + M2))
