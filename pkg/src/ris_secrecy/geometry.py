"""Scene geometry: node positions, the zero-thickness obstacle and RIS bounds.

All coordinates are meters in double precision. The obstacle is a flat
rectangle given by its four corners; link blockage is modelled with the two
half-space tests built from the planes through S (resp. D) and the obstacle's
left edge, and validated against an exact segment/rectangle intersection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

Vec3 = tuple[float, float, float]

COPLANAR_TOL = 1e-9
TANGENT_MERGE = 1e-9
# points on a far-field sphere are built from radius d_f exactly; allow rounding
FAR_FIELD_TOL = 1e-9


class DegeneratePlaneError(ValueError):
    """A node is collinear with the obstacle's left edge."""


def _vec3(v: Sequence[float], name: str) -> Vec3:
    arr = np.asarray(v, dtype=float).reshape(-1)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be a finite 3-vector, got {v!r}")
    return (float(arr[0]), float(arr[1]), float(arr[2]))


def _pair(v: Sequence[float], name: str) -> tuple[float, float]:
    lo, hi = (float(x) for x in v)
    if lo > hi:
        raise ValueError(f"{name}: min {lo} exceeds max {hi}")
    return (lo, hi)


@dataclass(frozen=True)
class Scene:
    """Immutable room description.

    Coordinates are stored as tuples so that scenes are hashable and can key
    placement caches; use the array properties for arithmetic.
    """

    source: Vec3
    destination: Vec3
    eavesdropper: Vec3
    room: Vec3
    obstacle_ll: Vec3
    obstacle_ul: Vec3
    obstacle_lr: Vec3
    obstacle_ur: Vec3
    x_bounds: tuple[float, float]
    y_bounds: tuple[float, float]
    z_bounds: tuple[float, float]
    d_far: float = 0.5

    def __post_init__(self) -> None:
        for name in ("source", "destination", "eavesdropper", "room", "obstacle_ll",
                     "obstacle_ul", "obstacle_lr", "obstacle_ur"):
            object.__setattr__(self, name, _vec3(getattr(self, name), name))
        for name in ("x_bounds", "y_bounds", "z_bounds"):
            object.__setattr__(self, name, _pair(getattr(self, name), name))
        object.__setattr__(self, "d_far", float(self.d_far))

        if self.d_far <= 0:
            raise ValueError("far-field radius must be positive")
        room = np.asarray(self.room)
        if np.any(room <= 0):
            raise ValueError("room extents must be positive")
        for name in ("source", "destination", "eavesdropper"):
            p = np.asarray(getattr(self, name))
            if np.any(p < 0) or np.any(p > room):
                raise ValueError(f"{name} {getattr(self, name)} lies outside the room")
        for axis, (lo, hi) in enumerate((self.x_bounds, self.y_bounds, self.z_bounds)):
            if lo < 0 or hi > room[axis]:
                raise ValueError(f"RIS bounds on axis {axis} exceed the room")

        ll, ul, lr, ur = self.obstacle
        scale = max(1.0, float(np.max(np.abs(self.obstacle))))
        vol = float(np.dot(lr - ll, np.cross(ul - ll, ur - ll)))
        if abs(vol) > COPLANAR_TOL * scale**3:
            raise ValueError(f"obstacle corners are not coplanar (triple product {vol:.3e})")

    # array views -------------------------------------------------------
    @property
    def p_s(self) -> np.ndarray:
        return np.array(self.source)

    @property
    def p_d(self) -> np.ndarray:
        return np.array(self.destination)

    @property
    def p_e(self) -> np.ndarray:
        return np.array(self.eavesdropper)

    @property
    def obstacle(self) -> np.ndarray:
        """Corners as a (4, 3) array ordered ll, ul, lr, ur."""
        return np.array([self.obstacle_ll, self.obstacle_ul, self.obstacle_lr, self.obstacle_ur])

    @property
    def bounds(self) -> np.ndarray:
        """RIS deployment box as a (3, 2) array of [min, max] rows."""
        return np.array([self.x_bounds, self.y_bounds, self.z_bounds])

    @cached_property
    def normals(self) -> "PlaneNormals":
        return plane_normals(self)

    def with_bounds(self, x=None, y=None, z=None) -> "Scene":
        """Copy of the scene with some RIS bounds replaced."""
        return replace(
            self,
            x_bounds=self.x_bounds if x is None else tuple(x),
            y_bounds=self.y_bounds if y is None else tuple(y),
            z_bounds=self.z_bounds if z is None else tuple(z),
        )

    @classmethod
    def default(cls) -> "Scene":
        """The 10 m x 10 m x 3 m office with the half-wall obstacle at x = 5."""
        lx, ly, lz = 10.0, 10.0, 3.0
        return cls(
            source=(4.0, 6.0, 2.0),
            destination=(8.0, 7.0, 1.5),
            eavesdropper=(8.5, 7.0, 1.5),
            room=(lx, ly, lz),
            obstacle_ll=(lx / 2, ly / 2, 0.0),
            obstacle_ul=(lx / 2, ly / 2, lz),
            obstacle_lr=(lx / 2, ly, 0.0),
            obstacle_ur=(lx / 2, ly, lz),
            x_bounds=(0.0, lx),
            y_bounds=(0.0, ly),
            z_bounds=(0.0, lz),
            d_far=0.5,
        )


class PlaneNormals(NamedTuple):
    """Sign-calibrated normals of the S-edge and D-edge planes."""

    beta1: np.ndarray
    beta2: np.ndarray


def distance(a, b) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))


def _edge_normal(p: np.ndarray, ll: np.ndarray, ul: np.ndarray) -> np.ndarray:
    # [b1, -b2, b3] with the three 2x2 minors of (ll - p, ul - p)
    u, v = ll - p, ul - p
    b1 = u[1] * v[2] - v[1] * u[2]
    b2 = u[0] * v[2] - v[0] * u[2]
    b3 = u[0] * v[1] - v[0] * u[1]
    return np.array([b1, -b2, b3])


def plane_normals(scene: Scene, probe=None) -> PlaneNormals:
    """Normals of the planes through S (resp. D) and the obstacle's left edge.

    The raw cross-product orientation is arbitrary, so each normal is flipped
    until ``probe`` (default: midpoint of S and the room origin) sits on the
    clear side: positive for ``beta1``, negative for ``beta2``. When the probe
    lies on a plane (it does for the D-edge plane of the default office), the
    far edge of the obstacle, which is always in the shadow, fixes the sign.

    Raises
    ------
    DegeneratePlaneError
        If S or D is collinear with the left edge.
    """
    ll, ul = np.array(scene.obstacle_ll), np.array(scene.obstacle_ul)
    far_edge = (np.array(scene.obstacle_lr) + np.array(scene.obstacle_ur)) / 2.0
    probe = scene.p_s / 2.0 if probe is None else np.asarray(probe, dtype=float)
    edge = np.linalg.norm(ul - ll)
    out = []
    for node, sign, label in ((scene.p_s, 1.0, "source"), (scene.p_d, -1.0, "destination")):
        beta = _edge_normal(node, ll, ul)
        nb = np.linalg.norm(beta)
        ref = edge * max(np.linalg.norm(ll - node), np.linalg.norm(ul - node))
        if nb <= 1e-12 * max(ref, 1.0):
            raise DegeneratePlaneError(f"{label} is collinear with the obstacle's left edge")
        side = sign * float(beta @ (probe - node))
        if abs(side) > 1e-9 * nb * max(1.0, np.linalg.norm(probe - node)):
            flip = side < 0
        else:
            flip = sign * float(beta @ (far_edge - node)) > 0
        out.append(-beta if flip else beta)
    return PlaneNormals(out[0], out[1])


def los_clear(p_i, scene: Scene, normals: PlaneNormals | None = None) -> tuple[bool, bool]:
    """Half-space tests for the S-I link and the I-D link (strict inequalities)."""
    n = scene.normals if normals is None else normals
    p = np.asarray(p_i, dtype=float)
    return bool(n.beta1 @ (p - scene.p_s) > 0), bool(n.beta2 @ (p - scene.p_d) < 0)


def segment_blocked(a, b, scene: Scene) -> bool:
    """True iff the open segment (a, b) touches the closed obstacle rectangle."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = b - a
    if not np.any(d):
        return False
    ll, ul, lr, _ = scene.obstacle
    e_u, e_v = lr - ll, ul - ll
    normal = np.cross(e_u, e_v)
    denom = float(normal @ d)
    side = float(normal @ (a - ll))
    scale = np.linalg.norm(normal)

    def uv(p):
        w = p - ll
        return float(w @ e_u) / float(e_u @ e_u), float(w @ e_v) / float(e_v @ e_v)

    if abs(denom) <= 1e-14 * scale * np.linalg.norm(d):
        if abs(side) > 1e-12 * scale:
            return False
        # in-plane segment: clip against the unit square in (u, v)
        u0, v0 = uv(a)
        u1, v1 = uv(b)
        lo, hi = 0.0, 1.0
        for p0, dp in ((u0, u1 - u0), (v0, v1 - v0)):
            if dp == 0.0:
                if p0 < 0.0 or p0 > 1.0:
                    return False
                continue
            t0, t1 = (0.0 - p0) / dp, (1.0 - p0) / dp
            if t0 > t1:
                t0, t1 = t1, t0
            lo, hi = max(lo, t0), min(hi, t1)
        return lo <= hi
    t = -side / denom
    if t <= 0.0 or t >= 1.0:
        return False
    u, v = uv(a + t * d)
    return 0.0 <= u <= 1.0 and 0.0 <= v <= 1.0


def far_field_ok(p_i, scene: Scene) -> bool:
    p = np.asarray(p_i, dtype=float)
    d_f = scene.d_far - FAR_FIELD_TOL
    return all(np.linalg.norm(p - q) >= d_f for q in (scene.p_s, scene.p_d, scene.p_e))


def in_bounds(p_i, scene: Scene) -> bool:
    p = np.asarray(p_i, dtype=float)
    b = scene.bounds
    return bool(np.all(p >= b[:, 0]) and np.all(p <= b[:, 1]))


def placement_feasible(p_i, scene: Scene) -> bool:
    """All location constraints: bounds, far field from S, D and E, and both LOS tests."""
    return in_bounds(p_i, scene) and far_field_ok(p_i, scene) and all(los_clear(p_i, scene))


def feasible_mask(points: np.ndarray, scene: Scene) -> np.ndarray:
    """Vectorised :func:`placement_feasible` over an (M, 3) array."""
    pts = np.asarray(points, dtype=float)
    b = scene.bounds
    n = scene.normals
    ok = np.all((pts >= b[:, 0]) & (pts <= b[:, 1]), axis=1)
    d_f2 = (scene.d_far - FAR_FIELD_TOL) ** 2
    for node in (scene.p_s, scene.p_d, scene.p_e):
        ok &= np.sum((pts - node) ** 2, axis=1) >= d_f2
    ok &= (pts - scene.p_s) @ n.beta1 > 0
    ok &= (pts - scene.p_d) @ n.beta2 < 0
    return ok


def box_corners(scene: Scene) -> np.ndarray:
    """The eight corners of the RIS bounds, ordered as p_1 ... p_8."""
    (x0, x1), (y0, y1), (z0, z1) = scene.x_bounds, scene.y_bounds, scene.z_bounds
    return np.array([[x, y, z] for x in (x0, x1) for y in (y0, y1) for z in (z0, z1)])


def corner_distances(scene: Scene) -> tuple[float, float]:
    """Largest S-corner and D-corner distances over the bounds box."""
    c = box_corners(scene)
    return (float(np.max(np.linalg.norm(c - scene.p_s, axis=1))),
            float(np.max(np.linalg.norm(c - scene.p_d, axis=1))))


def circle_intersection(z: float, d_si: float, d_id: float, scene: Scene) -> list[np.ndarray]:
    """Points at height ``z`` lying at distance ``d_si`` from S and ``d_id`` from D.

    Returns zero, one (tangency, roots closer than 1e-9 m merged) or two
    points. An empty list means the two spheres do not meet on this plane.
    """
    s, d = scene.p_s, scene.p_d
    rs2 = d_si * d_si - (z - s[2]) ** 2
    rd2 = d_id * d_id - (z - d[2]) ** 2
    if rs2 < 0.0 or rd2 < 0.0:
        return []
    dx, dy = d[0] - s[0], d[1] - s[1]
    sep2 = dx * dx + dy * dy
    if sep2 == 0.0:
        return []
    sep = math.sqrt(sep2)
    along = (rs2 - rd2 + sep2) / (2.0 * sep)
    h2 = rs2 - along * along
    if h2 < 0.0:
        # allow tiny negative values from rounding at tangency
        if h2 < -1e-12 * max(rs2, 1.0):
            return []
        h2 = 0.0
    h = math.sqrt(h2)
    mx, my = s[0] + along * dx / sep, s[1] + along * dy / sep
    ox, oy = -dy / sep * h, dx / sep * h
    first = np.array([mx + ox, my + oy, z])
    if h <= TANGENT_MERGE / 2:
        return [np.array([mx, my, z])]
    return [first, np.array([mx - ox, my - oy, z])]
