"""Path loss, Rician small-scale fading, SNRs and the secrecy rate.

Powers are linear (watts) everywhere inside the library; dBm only appears at
the configuration boundary via :func:`dbm_to_watts`. The reflect vector ``q``
multiplies channels without conjugation, ``q @ h``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import Scene, distance

MODULUS_TOL = 1e-8


def dbm_to_watts(x: float) -> float:
    return 10.0 ** ((x - 30.0) / 10.0)


@dataclass(frozen=True)
class LinkBudget:
    """Transmit power, noise variance, 1 m path loss and path-loss exponents."""

    ps: float = dbm_to_watts(10.0)
    noise_var: float = dbm_to_watts(-40.0)
    xi0: float = 1e-3
    alpha_si: float = 2.2
    alpha_id: float = 2.2
    alpha_ie: float = 2.2

    def __post_init__(self):
        for name in ("ps", "noise_var", "xi0", "alpha_si", "alpha_id", "alpha_ie"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_dbm(cls, ps_dbm: float, noise_dbm: float = -40.0, **kw) -> "LinkBudget":
        return cls(ps=dbm_to_watts(ps_dbm), noise_var=dbm_to_watts(noise_dbm), **kw)


@dataclass(frozen=True)
class FadingParams:
    k_si: float = 1.0
    k_id: float = 1.0
    k_ie: float = 1.0
    var_si: float = 1.0
    var_id: float = 1.0
    var_ie: float = 1.0
    seed: int = 0

    def __post_init__(self):
        for name in ("k_si", "k_id", "k_ie"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        for name in ("var_si", "var_id", "var_ie"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


def cascade(h_a, h_b) -> np.ndarray:
    """diag(h_a) @ h_b, computed elementwise."""
    h_a = np.asarray(h_a, dtype=complex)
    h_b = np.asarray(h_b, dtype=complex)
    if h_a.shape != h_b.shape:
        raise ValueError(f"length mismatch: {h_a.shape} vs {h_b.shape}")
    return h_a * h_b


@dataclass(frozen=True)
class ChannelSet:
    """Small-scale fading of one realization plus the two cascaded channels."""

    h_si: np.ndarray
    h_id: np.ndarray
    h_ie: np.ndarray

    def __post_init__(self):
        vecs = [np.asarray(getattr(self, k), dtype=complex).reshape(-1)
                for k in ("h_si", "h_id", "h_ie")]
        if len({v.shape for v in vecs}) != 1:
            raise ValueError("h_si, h_id and h_ie must share one length")
        for k, v in zip(("h_si", "h_id", "h_ie"), vecs):
            v.setflags(write=False)
            object.__setattr__(self, k, v)
        object.__setattr__(self, "h_sid", cascade(vecs[0], vecs[1]))
        object.__setattr__(self, "h_sie", cascade(vecs[0], vecs[2]))

    @property
    def n(self) -> int:
        return self.h_si.size

    @classmethod
    def cascaded(cls, h_sid, h_sie) -> "ChannelSet":
        """Channel set with prescribed cascades (S-I fading taken as all ones)."""
        h_sid = np.asarray(h_sid, dtype=complex).reshape(-1)
        return cls(np.ones_like(h_sid), h_sid, np.asarray(h_sie, dtype=complex).reshape(-1))

    @classmethod
    def from_miso(cls, H_si, b_s, h_id, h_ie) -> "ChannelSet":
        """Multi-antenna source: the effective S-I fading is ``H_si @ b_s``."""
        return cls(np.asarray(H_si, dtype=complex) @ np.asarray(b_s, dtype=complex), h_id, h_ie)

    def save(self, path) -> None:
        """Write a columnar text file: one row per element, re/im per vector."""
        cols = []
        for v in (self.h_si, self.h_id, self.h_ie, self.h_sid, self.h_sie):
            cols += [v.real, v.imag]
        header = " ".join(f"{k}.{p}" for k in ("h_si", "h_id", "h_ie", "h_sid", "h_sie")
                          for p in ("re", "im"))
        np.savetxt(path, np.column_stack(cols), fmt="%.17g", header=header)

    @classmethod
    def load(cls, path) -> "ChannelSet":
        data = np.loadtxt(Path(path), ndmin=2)
        if data.shape[1] != 10:
            raise ValueError(f"expected 10 columns, found {data.shape[1]}")
        vec = [data[:, 2 * i] + 1j * data[:, 2 * i + 1] for i in range(5)]
        ch = cls(vec[0], vec[1], vec[2])
        if not (np.allclose(ch.h_sid, vec[3], rtol=1e-12, atol=0)
                and np.allclose(ch.h_sie, vec[4], rtol=1e-12, atol=0)):
            raise ValueError("stored cascaded channels are inconsistent with their factors")
        return ch


def sample_rician(n: int, k: float, var: float, rng: np.random.Generator) -> np.ndarray:
    """``n`` i.i.d. Rician coefficients with a phase-0 LOS mean and total power ``var``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    los = math.sqrt(var * k / (k + 1.0))
    nlos = math.sqrt(var / (k + 1.0))
    g = rng.standard_normal((2, n))
    return los + nlos * (g[0] + 1j * g[1]) / math.sqrt(2.0)


def draw_channels(n: int, fading: FadingParams, rng: np.random.Generator) -> ChannelSet:
    return ChannelSet(
        sample_rician(n, fading.k_si, fading.var_si, rng),
        sample_rician(n, fading.k_id, fading.var_id, rng),
        sample_rician(n, fading.k_ie, fading.var_ie, rng),
    )


def effective_miso_channel(H_si, b_s, h_id) -> np.ndarray:
    """Cascade of the beamformed S-I channel ``H_si @ b_s`` with ``h_id``."""
    H_si = np.asarray(H_si, dtype=complex)
    b_s = np.asarray(b_s, dtype=complex).reshape(-1)
    if H_si.ndim != 2 or H_si.shape[1] != b_s.size:
        raise ValueError(f"H_si {H_si.shape} incompatible with b_s of length {b_s.size}")
    return cascade(H_si @ b_s, h_id)


# --- link quantities ------------------------------------------------------

def link_distances(p_i, scene: Scene) -> tuple[float, float, float]:
    d = (distance(p_i, scene.p_s), distance(p_i, scene.p_d), distance(p_i, scene.p_e))
    if min(d) <= 0.0:
        raise ValueError("RIS coincides with a node; path loss undefined")
    return d


def path_gain(d: float, alpha: float, xi0: float) -> float:
    """Large-scale power gain xi0 / d**alpha (equals xi0 at 1 m)."""
    return xi0 / d**alpha


def f_factors(p_i, lb: LinkBudget, scene: Scene) -> tuple[float, float, float]:
    d_si, d_id, d_ie = link_distances(p_i, scene)
    pl_id, pl_si, pl_ie = d_id**lb.alpha_id, d_si**lb.alpha_si, d_ie**lb.alpha_ie
    gain = lb.ps * lb.xi0**2
    return pl_id * pl_si * pl_ie, gain * pl_ie, gain * pl_id


def _q(q) -> np.ndarray:
    return np.asarray(q, dtype=complex).reshape(-1)


def snr_pair(q, p_i, ch: ChannelSet, lb: LinkBudget, scene: Scene) -> tuple[float, float]:
    """Instantaneous SNRs at D and at E."""
    q = _q(q)
    d_si, d_id, d_ie = link_distances(p_i, scene)
    gain = lb.ps * lb.xi0**2
    pl_si = d_si**lb.alpha_si
    g_d = gain * abs(q @ ch.h_sid) ** 2 / (d_id**lb.alpha_id * pl_si * lb.noise_var)
    g_e = gain * abs(q @ ch.h_sie) ** 2 / (d_ie**lb.alpha_ie * pl_si * lb.noise_var)
    return float(g_d), float(g_e)


def secrecy_rate(q, p_i, ch: ChannelSet, lb: LinkBudget, scene: Scene) -> float:
    """max(0, log2(1 + SNR_D) - log2(1 + SNR_E)) in bits/s/Hz."""
    g_d, g_e = snr_pair(q, p_i, ch, lb, scene)
    return max(0.0, math.log2(1.0 + g_d) - math.log2(1.0 + g_e))


def secrecy_rate_factored(q, p_i, ch: ChannelSet, lb: LinkBudget, scene: Scene) -> float:
    """Same quantity evaluated through the distance factors f1, f2, f3."""
    return max(0.0, math.log2(objective_F(q, p_i, ch, lb, scene)))


def objective_F(q, p_i, ch: ChannelSet, lb: LinkBudget, scene: Scene) -> float:
    """Ratio (1 + SNR_D) / (1 + SNR_E) written with the f-factors."""
    q = _q(q)
    f1, f2, f3 = f_factors(p_i, lb, scene)
    base = lb.noise_var * f1
    return float((base + f2 * abs(q @ ch.h_sid) ** 2) / (base + f3 * abs(q @ ch.h_sie) ** 2))


def objective_F_quadratic(q, p_i, ch: ChannelSet, lb: LinkBudget, scene: Scene) -> float:
    """``1 + c * q B q^H / (d_si^a d_id^a + c * a |q h_sie|^2)`` with c = Ps xi0^2 / noise."""
    q = _q(q)
    d_si, d_id, d_ie = link_distances(p_i, scene)
    ratio = d_id**lb.alpha_id / d_ie**lb.alpha_ie
    c = lb.ps * lb.xi0**2 / lb.noise_var
    B = np.outer(ch.h_sid, ch.h_sid.conj()) - ratio * np.outer(ch.h_sie, ch.h_sie.conj())
    quad = float(np.real(q @ B @ q.conj()))
    den = d_si**lb.alpha_si * d_id**lb.alpha_id + c * ratio * abs(q @ ch.h_sie) ** 2
    return 1.0 + c * quad / den
