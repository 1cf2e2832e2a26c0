"""Passive beamforming for a fixed RIS location.

The ratio F(q) = (1 + SNR_D) / (1 + SNR_E) is maximised over reflect vectors
with |q_n| <= 1. With Psi = q^H q the problem becomes a linear-fractional SDP
with a rank-one constraint; the Charnes-Cooper change of variables turns it
into a linear SDP in (Phi, t), and the rank-one constraint is approached by a
sequence of eigenvector cuts u^H Phi u >= omega tr(Phi) with omega -> 1.

The module also holds the spectral analysis of
B = h_SID h_SID^H - a h_SIE h_SIE^H (the numerator of SNR_D - SNR_E), which
shows that B always has a nonnegative direction.
"""
from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .channel import ChannelSet, LinkBudget, f_factors, link_distances, objective_F, secrecy_rate
from .geometry import Scene
from .sdp import SdpProblem, dump_problem, full_spectrum, hermitize, max_eigpair, solve_sdp

log = logging.getLogger(__name__)

RANK_TOL = 1e-8
DUMP_ENV = "RIS_SECRECY_SDP_DUMP_DIR"
_dump_count = 0


@dataclass(frozen=True)
class SrocrParams:
    xi1: float = 0.999
    xi2: float = 1e-4
    delta0: float = 0.1
    max_iter: int = 100
    solver_tol: float = 1e-6
    randomization_samples: int = 50

    def __post_init__(self):
        if not 0.0 < self.xi1 <= 1.0:
            raise ValueError("xi1 must lie in (0, 1]")
        if not self.xi2 > 0:
            raise ValueError("xi2 must be positive")
        if not 0.0 < self.delta0 <= 1.0:
            raise ValueError("delta0 must lie in (0, 1]")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


# --- spectral analysis of B ------------------------------------------------

def eve_ratio(p_i, scene: Scene, lb: LinkBudget) -> float:
    """a = d_ID**alpha_ID / d_IE**alpha_IE."""
    _, d_id, d_ie = link_distances(p_i, scene)
    return d_id**lb.alpha_id / d_ie**lb.alpha_ie


def b_matrix(h_sid, h_sie, a: float) -> np.ndarray:
    h_sid = np.asarray(h_sid, dtype=complex).reshape(-1)
    h_sie = np.asarray(h_sie, dtype=complex).reshape(-1)
    return hermitize(np.outer(h_sid, h_sid.conj()) - a * np.outer(h_sie, h_sie.conj()))


def build_B(ch: ChannelSet, p_i, scene: Scene, lb: LinkBudget) -> np.ndarray:
    return b_matrix(ch.h_sid, ch.h_sie, eve_ratio(p_i, scene, lb))


@dataclass
class SpectralReport:
    a: float
    c1: float
    c2: complex
    c3: float
    eig_B: np.ndarray
    eig_B1: np.ndarray
    eig_B2: np.ndarray
    weyl_low: np.ndarray
    weyl_high: np.ndarray
    nsd_verdict: bool
    rank_le_2: bool
    norm_B: float

    def weyl_holds(self, tol: float = 1e-9) -> np.ndarray:
        """Elementwise containment of eig_B in its Weyl interval (slack tol * |B|)."""
        slack = tol * max(self.norm_B, 1e-300)
        return (self.eig_B >= self.weyl_low - slack) & (self.eig_B <= self.weyl_high + slack)

    def trace_gap(self) -> float:
        """|sum(eig_B) - (c1 - a c3)| relative to c1 + a c3."""
        return abs(float(np.sum(self.eig_B)) - (self.c1 - self.a * self.c3)) / max(
            self.c1 + self.a * self.c3, 1e-300)


def weyl_intervals(eig_1, eig_2) -> tuple[np.ndarray, np.ndarray]:
    """Bounds on the ascending spectrum of B1 + B2 from those of B1 and B2.

    lambda_n >= lambda_{n-j+1}(B1) + lambda_j(B2), j = 1..n
    lambda_n <= lambda_{n+j-1}(B1) + lambda_{N-j+1}(B2), j = 1..N-n+1
    """
    e1 = np.sort(np.asarray(eig_1, dtype=float))
    e2 = np.sort(np.asarray(eig_2, dtype=float))
    n = e1.size
    lo, hi = np.empty(n), np.empty(n)
    for k in range(n):
        lo[k] = max(e1[k - j] + e2[j] for j in range(k + 1))
        hi[k] = min(e1[k + j] + e2[n - 1 - j] for j in range(n - k))
    return lo, hi


def closed_form_weyl_intervals(c1: float, c3: float, a: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """The looser closed-form intervals for N >= 2 (first, middle, last eigenvalue)."""
    if n < 2:
        raise ValueError("closed-form intervals need N >= 2")
    d = c1 - a * c3
    lo = np.zeros(n)
    hi = np.full(n, c1)
    lo[0], hi[0] = -a * c3, min(0.0, d)
    lo[-1], hi[-1] = max(0.0, d), c1
    return lo, hi


def spectral_analysis(B, ch: ChannelSet, a: float) -> SpectralReport:
    B = hermitize(B)
    n = B.shape[0]
    c1 = float(np.real(np.vdot(ch.h_sid, ch.h_sid)))
    c3 = float(np.real(np.vdot(ch.h_sie, ch.h_sie)))
    c2 = complex(np.vdot(ch.h_sie, ch.h_sid))
    eig = full_spectrum(B)
    eig1 = np.zeros(n)
    eig1[-1] = c1
    eig2 = np.zeros(n)
    eig2[0] = -a * c3
    lo, hi = weyl_intervals(eig1, eig2)
    norm = float(np.max(np.abs(eig))) if n else 0.0
    verdict = bool(eig[-1] > 1e-12 * norm or norm <= 1e-12 * (c1 + a * c3))
    mags = np.sort(np.abs(eig))[::-1]
    rank_ok = bool(n < 3 or mags[2] <= RANK_TOL * max(norm, 1e-300))
    return SpectralReport(a, c1, c2, c3, eig, np.sort(eig1), np.sort(eig2), lo, hi,
                          verdict, rank_ok, norm)


def nonzero_eig_closed_form(c1: float, c2: complex, c3: float, a: float) -> tuple[float, float]:
    """The two roots of lambda^2 - (c1 - a c3) lambda - a (c1 c3 - |c2|^2) = 0."""
    m = abs(c2)
    if m == 0.0:
        raise ValueError("closed form requires c2 != 0")
    rad = (c1 + a * c3) ** 2 / m**2 - 4.0 * a
    if rad < 0.0:
        if rad < -1e-12 * (c1 + a * c3) ** 2 / m**2:
            raise ValueError(f"negative radicand {rad}")
        rad = 0.0
    half = (c1 - a * c3) / 2.0
    w = m / 2.0 * math.sqrt(rad)
    return half + w, half - w


# --- Charnes-Cooper ----------------------------------------------------------

def charnes_cooper(ch: ChannelSet, p_i, scene: Scene, lb: LinkBudget) -> SdpProblem:
    """min s t + f3 <H_E, Phi>  s.t.  s t + f2 <H_D, Phi> = 1, 0 <= Phi_nn <= t, Phi >= 0."""
    f1, f2, f3 = f_factors(p_i, lb, scene)
    s = lb.noise_var * f1
    H_d = np.outer(ch.h_sid, ch.h_sid.conj())
    H_e = np.outer(ch.h_sie, ch.h_sie.conj())
    return SdpProblem(s, f3 * H_e, s, f2 * H_d)


def fractional_objective(Psi, ch: ChannelSet, p_i, scene: Scene, lb: LinkBudget) -> float:
    """(s + f3 tr(H_E Psi)) / (s + f2 tr(H_D Psi)) with s = noise * f1."""
    f1, f2, f3 = f_factors(p_i, lb, scene)
    s = lb.noise_var * f1
    Psi = np.asarray(Psi, dtype=complex)
    ee = float(np.real(ch.h_sie.conj() @ Psi @ ch.h_sie))
    dd = float(np.real(ch.h_sid.conj() @ Psi @ ch.h_sid))
    return (s + f3 * ee) / (s + f2 * dd)


def psi_to_phi_t(Psi, ch: ChannelSet, p_i, scene: Scene, lb: LinkBudget):
    """Charnes-Cooper map Psi -> (Phi, t) = (Psi, 1) / (s + f2 tr(H_D Psi))."""
    f1, f2, _ = f_factors(p_i, lb, scene)
    Psi = np.asarray(Psi, dtype=complex)
    den = lb.noise_var * f1 + f2 * float(np.real(ch.h_sid.conj() @ Psi @ ch.h_sid))
    return Psi / den, 1.0 / den


# --- SROCR -------------------------------------------------------------------

def _solve_logged(p: SdpProblem, tol: float):
    """solve_sdp, writing failed problems to $RIS_SECRECY_SDP_DUMP_DIR when set."""
    global _dump_count
    sol = solve_sdp(p, tol=tol)
    out = os.environ.get(DUMP_ENV)
    if out and not sol.ok:
        os.makedirs(out, exist_ok=True)
        _dump_count += 1
        path = os.path.join(out, f"sdp_{os.getpid()}_{_dump_count:05d}.json")
        dump_problem(p, path, sol)
        log.warning("SDP %s after %d iterations; dumped to %s", sol.status, sol.iterations, path)
    return sol


def rank_ratio(M) -> float:
    """lambda_max / trace; 1 for the zero matrix."""
    M = hermitize(M)
    tr = float(np.real(np.trace(M)))
    if tr <= 0.0:
        return 1.0
    return min(1.0, max_eigpair(M)[0] / tr)


@dataclass
class SrocrResult:
    Phi: np.ndarray
    t: float
    objective: float
    degraded: bool
    iterations: int
    rank_ratio: float
    trace: list = field(default_factory=list)


def srocr_solve(problem: SdpProblem, params: SrocrParams = SrocrParams()) -> SrocrResult:
    """Relaxed solve followed by eigenvector cuts with a growing omega."""
    base = problem.without_cut()
    sol = _solve_logged(base, params.solver_tol)
    trace = [{"iter": 0, "omega": 0.0, "delta": params.delta0, "objective": sol.objective_value,
              "status": sol.status, "rank_ratio": rank_ratio(sol.Phi)}]
    if not sol.ok:
        return SrocrResult(sol.Phi, sol.t, sol.objective_value, True, 0, trace[0]["rank_ratio"], trace)
    Phi, t, g = sol.Phi, sol.t, sol.objective_value
    omega, delta = 0.0, params.delta0
    ratio = trace[0]["rank_ratio"]
    i = 0
    while True:
        u = max_eigpair(Phi)[1]
        sol = _solve_logged(base.with_cut(u, omega), params.solver_tol)
        g_prev = g
        if sol.ok:
            Phi, t, g = sol.Phi, sol.t, sol.objective_value
            delta = params.delta0
        else:
            delta = delta / 2.0
        ratio = rank_ratio(Phi)
        i += 1
        trace.append({"iter": i, "omega": omega, "delta": delta, "objective": g,
                      "status": sol.status, "rank_ratio": ratio})
        omega = min(1.0, ratio + delta)
        if (omega >= params.xi1 and abs(g - g_prev) <= params.xi2) or i >= params.max_iter:
            break
    degraded = ratio < params.xi1
    return SrocrResult(Phi, t, g, degraded, i, ratio, trace)


def _normalize_phase(q: np.ndarray) -> np.ndarray:
    mags = np.abs(q)
    if mags.size == 0 or mags.max() == 0.0:
        return q
    k = int(np.argmax(mags > 1e-12 * mags.max()))
    return q * (mags[k] / q[k])


def clip_moduli(q) -> np.ndarray:
    q = np.asarray(q, dtype=complex).copy()
    big = np.abs(q) > 1.0
    q[big] = q[big] / np.abs(q[big])
    return q


def recover_q(Phi, t: float) -> np.ndarray:
    """Principal-eigenvector factor of Psi = Phi / t with moduli clipped to 1."""
    if not t > 0:
        raise ValueError("t must be positive")
    lam, u = max_eigpair(np.asarray(Phi) / t)
    q = math.sqrt(max(lam, 0.0)) * u.conj()
    return _normalize_phase(clip_moduli(q))


def gaussian_randomization(Psi, score, samples: int, rng: np.random.Generator) -> np.ndarray:
    """Draw q = conj(w), w ~ CN(0, Psi); clip moduli; keep the best ``score``."""
    w, V = np.linalg.eigh(hermitize(Psi))
    L = V * np.sqrt(np.clip(w, 0.0, None))
    n = L.shape[0]
    best_q, best_s = None, -math.inf
    for _ in range(samples):
        g = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2.0)
        q = clip_moduli((L @ g).conj())
        s = score(q)
        if s > best_s:
            best_q, best_s = q, s
    return _normalize_phase(best_q)


# --- oracle and pipeline -----------------------------------------------------

def exhaustive_q_oracle(ch: ChannelSet, p_i, scene: Scene, lb: LinkBudget,
                        phase_levels: int = 64, amp_levels: int = 8):
    """Best F over the amplitude x phase grid; q_1 is fixed real (phase invariance)."""
    n = ch.n
    if n > 3:
        raise ValueError("exhaustive search is limited to N <= 3")
    amps = np.linspace(0.0, 1.0, amp_levels)
    phases = np.exp(2j * np.pi * np.arange(phase_levels) / phase_levels)
    vals = (amps[:, None] * phases[None, :]).reshape(-1)
    f1, f2, f3 = f_factors(p_i, lb, scene)
    base = lb.noise_var * f1
    F, idx = _kernels.enumerate_q(amps.astype(complex), vals, n, ch.h_sid, ch.h_sie,
                                  base, f2, f3)
    q = np.array([amps[idx[0]]] + [vals[i] for i in idx[1:]], dtype=complex)
    return q, F


@dataclass
class BeamformingResult:
    q: np.ndarray
    rate: float
    F: float
    degraded: bool
    source: str
    constraint_ok: bool
    srocr: SrocrResult | None = None

    def __iter__(self):
        # allows ``q, rate = optimize_beamforming(...)``
        return iter((self.q, self.rate))


def optimize_beamforming(ch: ChannelSet, p_i, scene: Scene, lb: LinkBudget,
                         params: SrocrParams = SrocrParams(),
                         rng: np.random.Generator | None = None) -> BeamformingResult:
    """Charnes-Cooper SDP, SROCR, rank-one recovery, then the q = 0 floor."""
    problem = charnes_cooper(ch, p_i, scene, lb)
    res = srocr_solve(problem, params)
    score = lambda q: objective_F(q, p_i, ch, lb, scene)  # noqa: E731
    q = recover_q(res.Phi, res.t) if res.t > 0 else np.zeros(ch.n, dtype=complex)
    source = "srocr"
    F = score(q)
    if res.degraded and res.t > 0:
        gen = rng if rng is not None else np.random.default_rng(0)
        q_r = gaussian_randomization(res.Phi / res.t, score, params.randomization_samples, gen)
        F_r = score(q_r)
        if F_r > F:
            q, F, source = q_r, F_r, "randomization"
    if F < 1.0:
        q, F, source = np.zeros(ch.n, dtype=complex), 1.0, "zero"

    B = build_B(ch, p_i, scene, lb)
    qbq = float(np.real(q @ B @ q.conj()))
    ok = qbq >= -1e-9 * float(np.real(np.trace(np.abs(B))))
    if not ok:
        log.warning("dropped constraint q B q^H >= 0 violated: %.3e", qbq)
    rate = secrecy_rate(q, p_i, ch, lb, scene)
    return BeamformingResult(q, rate, F, res.degraded, source, ok, res)
