"""Self-contained property checks behind ``ris-secrecy verify``.

Each check returns (passed, detail). The quick profile uses small sample
counts and finishes in well under a minute; ``full=True`` uses the sample
sizes of the acceptance suite. The random-instance generators here are also
used by the test-suite.
"""
from __future__ import annotations

import json
import math
import sys
import time

import numpy as np

from . import _kernels
from .beamforming import (build_B, charnes_cooper, eve_ratio, exhaustive_q_oracle,
                          fractional_objective, nonzero_eig_closed_form, optimize_beamforming,
                          closed_form_weyl_intervals, psi_to_phi_t, spectral_analysis)
from .channel import FadingParams, LinkBudget, draw_channels, secrecy_rate, secrecy_rate_factored
from .geometry import Scene, feasible_mask, los_clear, segment_blocked
from .placement import PlacementGrid, brute_force_placement, outer_optimize
from .sdp import SdpProblem, solve_sdp

DEFAULT_P_I = np.array([4.88, 4.92, 2.1])


# --- random instances --------------------------------------------------------

def random_hermitian(n: int, rng: np.random.Generator, psd: bool = False) -> np.ndarray:
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return G @ G.conj().T / n if psd else (G + G.conj().T) / 2.0


def random_sdp_instance(n: int, rng: np.random.Generator) -> SdpProblem:
    """Bounded instance with a known strictly feasible point.

    An interior point (Phi0 positive definite, 0 < Phi0_nn < t0) is sampled
    first; the normalisation row (a, A), with A PSD and a > 0, is then scaled
    so that a t0 + <A, Phi0> = 1. C is indefinite.
    """
    t0 = float(rng.uniform(0.5, 2.0))
    Phi0 = random_psi(n, rng) * (0.8 * t0) + 0.05 * t0 * np.eye(n)
    A = random_hermitian(n, rng, psd=True)
    a = float(rng.uniform(0.2, 2.0))
    scale = a * t0 + float(np.real(np.vdot(A, Phi0)))
    C = random_hermitian(n, rng)
    c0 = float(rng.uniform(-1.0, 1.0))
    return SdpProblem(c0, C, a / scale, A / scale)


def random_psi(n: int, rng: np.random.Generator) -> np.ndarray:
    """A feasible Psi: PSD with unit-bounded diagonal."""
    rank = int(rng.integers(1, n + 1))
    G = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    P = G @ G.conj().T
    d = np.sqrt(np.real(np.diag(P)))
    s = rng.uniform(0.05, 1.0, n) / np.where(d > 0, d, 1.0)
    return (s[:, None] * P) * s[None, :]


def random_scene(rng: np.random.Generator) -> Scene:
    """Office-like room with a half-wall at a random x; S on one side, D and E on the other."""
    lx, ly, lz = rng.uniform(8.0, 12.0), rng.uniform(8.0, 12.0), rng.uniform(2.6, 3.4)
    wx = rng.uniform(0.4, 0.6) * lx
    wy = rng.uniform(0.3, 0.6) * ly
    s = (rng.uniform(1.0, wx - 0.6), rng.uniform(wy + 0.5, ly - 1.0), rng.uniform(1.0, lz - 0.5))
    d = (rng.uniform(wx + 1.5, lx - 1.2), rng.uniform(wy + 0.5, ly - 1.0), rng.uniform(1.0, 2.0))
    e = (min(lx - 0.2, d[0] + rng.uniform(0.3, 1.0)), d[1] + rng.uniform(-0.5, 0.5), d[2])
    return Scene(source=s, destination=d, eavesdropper=e, room=(lx, ly, lz),
                 obstacle_ll=(wx, wy, 0.0), obstacle_ul=(wx, wy, lz),
                 obstacle_lr=(wx, ly, 0.0), obstacle_ur=(wx, ly, lz),
                 x_bounds=(0.0, lx), y_bounds=(0.0, ly), z_bounds=(0.0, lz), d_far=0.5)


# --- checks --------------------------------------------------------------------

def check_los_soundness(samples: int, rng) -> tuple[bool, str]:
    sc = Scene.default()
    pts = rng.uniform([0, 0, 0], sc.room, size=(samples, 3))
    bad = 0
    for p in pts:
        ok_s, ok_d = los_clear(p, sc)
        if ok_s and segment_blocked(p, sc.p_s, sc):
            bad += 1
        if ok_d and segment_blocked(p, sc.p_d, sc):
            bad += 1
    return bad == 0, f"{samples} points, {bad} half-space passes with a blocked segment"


def check_rate_factorisation(samples: int, rng) -> tuple[bool, str]:
    sc, lb = Scene.default(), LinkBudget()
    worst = 0.0
    for _ in range(samples):
        n = int(rng.integers(1, 17))
        ch = draw_channels(n, FadingParams(), rng)
        q = np.exp(2j * np.pi * rng.random(n)) * rng.random(n)
        r1, r2 = secrecy_rate(q, DEFAULT_P_I, ch, lb, sc), secrecy_rate_factored(q, DEFAULT_P_I, ch, lb, sc)
        worst = max(worst, abs(r1 - r2) / max(1.0, abs(r1)))
    return worst <= 1e-10, f"max rel. difference {worst:.2e}"


def check_spectral(samples: int, rng) -> tuple[bool, str]:
    sc, lb = Scene.default(), LinkBudget()
    a = eve_ratio(DEFAULT_P_I, sc, lb)
    fails = []
    for n in (2, 4, 8, 16):
        for _ in range(samples):
            ch = draw_channels(n, FadingParams(), rng)
            B = build_B(ch, DEFAULT_P_I, sc, lb)
            rep = spectral_analysis(B, ch, a)
            if not rep.nsd_verdict:
                fails.append("nsd")
            if not rep.weyl_holds().all():
                fails.append("weyl")
            lo, hi = closed_form_weyl_intervals(rep.c1, rep.c3, a, n)
            slack = 1e-9 * rep.norm_B
            if np.any(rep.eig_B < lo - slack) or np.any(rep.eig_B > hi + slack):
                fails.append("weyl-closed-form")
            d = rep.c1 - a * rep.c3
            if d < 0 and abs(rep.c2) > 0 and np.min(np.abs(rep.eig_B - d)) <= 1e-9 * rep.norm_B:
                fails.append("trace-not-eigenvalue")
            if rep.trace_gap() > 1e-9:
                fails.append("trace")
            if not rep.rank_le_2:
                fails.append("rank")
            l1, l2 = nonzero_eig_closed_form(rep.c1, rep.c2, rep.c3, a)
            ev = np.sort(rep.eig_B)
            if max(abs(l1 - ev[-1]), abs(l2 - ev[0])) > 1e-8 * rep.norm_B:
                fails.append("closed-form")
    return not fails, f"{4 * samples} draws, failures: {sorted(set(fails)) or 'none'}"


def check_charnes_cooper(samples: int, rng) -> tuple[bool, str]:
    sc, lb = Scene.default(), LinkBudget()
    worst = 0.0
    for _ in range(samples):
        n = int(rng.integers(1, 17))
        ch = draw_channels(n, FadingParams(), rng)
        Psi = random_psi(n, rng)
        Phi, t = psi_to_phi_t(Psi, ch, DEFAULT_P_I, sc, lb)
        g = charnes_cooper(ch, DEFAULT_P_I, sc, lb).objective(Phi, t)
        f = fractional_objective(Psi, ch, DEFAULT_P_I, sc, lb)
        worst = max(worst, abs(g - f) / abs(f))
    return worst <= 1e-10, f"max rel. difference {worst:.2e}"


def check_sdp_certificates(samples: int, rng) -> tuple[bool, str]:
    worst, bad = 0.0, 0
    for _ in range(samples):
        p = random_sdp_instance(int(rng.integers(1, 17)), rng)
        sol = solve_sdp(p)
        worst = max(worst, max(sol.kkt_residuals))
        bad += not sol.ok
    return bad == 0 and worst <= 1e-6, f"{samples} instances, {bad} not optimal, worst KKT {worst:.1e}"


def check_beamforming_oracle(samples: int, rng) -> tuple[bool, str]:
    sc = Scene.default()
    worst = math.inf
    for i in range(samples):
        lb = LinkBudget.from_dbm(float(rng.choice([10.0, 20.0, 30.0])))
        ch = draw_channels(1 + i % 3, FadingParams(), rng)
        F = optimize_beamforming(ch, DEFAULT_P_I, sc, lb, rng=rng).F
        _, F_o = exhaustive_q_oracle(ch, DEFAULT_P_I, sc, lb)
        worst = min(worst, F / F_o)
    return worst >= 0.98, f"{samples} instances, worst F/oracle {worst:.4f}"


def check_backends(samples: int, rng) -> tuple[bool, str]:
    if _kernels.compiled is None:
        return True, "compiled backend not built; fallback only"
    sc, lb, grid = Scene.default(), LinkBudget(), PlacementGrid()
    from .placement import inner_optimize
    mism = 0
    for z in rng.uniform(0.0, 3.0, samples).round(1):
        a = inner_optimize(z, sc, lb, grid)
        _kernels.inner_scan, saved = _kernels.fallback.inner_scan, _kernels.inner_scan
        try:
            b = inner_optimize(z, sc, lb, grid)
        finally:
            _kernels.inner_scan = saved
        if a.feasible != b.feasible or a.inner_evals != b.inner_evals or (
                a.feasible and not np.array_equal(a.p_opt, b.p_opt)):
            mism += 1
    return mism == 0, f"{samples} slabs, {mism} mismatches"


def check_placement(step: float, rng) -> tuple[bool, str]:
    sc, lb = Scene.default(), LinkBudget()
    r = outer_optimize(sc, lb)
    bf = brute_force_placement(sc, lb, step)
    ok_loc = np.all(np.abs(r.p_opt - [4.88, 4.92, 2.10]) <= [0.15, 0.15, 0.10])
    ratio = r.g_opt / bf.g_opt
    return bool(ok_loc and ratio <= 1.03 and feasible_mask(r.p_opt[None], sc)[0]), (
        f"p_opt {np.round(r.p_opt, 3).tolist()}, g/oracle {ratio:.4f} (step {step})")


def run_all(full: bool = False, as_json: bool = False, seed: int = 7) -> int:
    rng = np.random.default_rng(seed)
    k = 1000 if full else 25
    checks = [
        ("geometry: LOS half-space tests are sound", lambda: check_los_soundness(20 * k, rng)),
        ("channel: rate equals factored form", lambda: check_rate_factorisation(k, rng)),
        ("spectral: NSD, Weyl, trace, rank, closed form", lambda: check_spectral(k, rng)),
        ("Charnes-Cooper map preserves the objective", lambda: check_charnes_cooper(
            100 if full else 20, rng)),
        ("SDP: optimal with certificates", lambda: check_sdp_certificates(100 if full else 15, rng)),
        ("beamforming: within 2% of exhaustive search", lambda: check_beamforming_oracle(
            50 if full else 6, rng)),
        ("kernels: compiled matches fallback", lambda: check_backends(31 if full else 5, rng)),
        ("placement: reproduces optimum and oracle", lambda: check_placement(
            0.1 if full else 0.2, rng)),
    ]
    results = []
    for name, fn in checks:
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # report and keep going
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append({"check": name, "passed": bool(ok), "detail": detail,
                        "seconds": round(time.perf_counter() - t0, 3)})
        if not as_json:
            print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
            sys.stdout.flush()
    if as_json:
        print(json.dumps({"backend": _kernels.BACKEND, "results": results}, indent=1))
    return 0 if all(r["passed"] for r in results) else 1
