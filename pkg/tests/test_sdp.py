import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ris_secrecy.sdp import (HermitianMatrix, SdpProblem, complex_embedding, dump_problem, eigh,
                             full_spectrum, hermitize, jacobi_eigh, load_problem, max_eigpair,
                             solve_sdp)
from ris_secrecy.sdp.linalg import jacobi_eigh_real
from ris_secrecy.verify import random_hermitian, random_sdp_instance

cp = pytest.importorskip("cvxpy")


def clarabel_value(p: SdpProblem) -> float:
    """Optimal value from Clarabel on the real 2N x 2N embedding of the problem."""
    n = p.n
    X = cp.Variable((2 * n, 2 * n), symmetric=True)
    t = cp.Variable(nonneg=True)
    R, Im = X[:n, :n], X[n:, :n]

    def inner(M):  # Re <M, Phi> with Phi = R + i Im
        return cp.sum(cp.multiply(M.real, R)) + cp.sum(cp.multiply(M.imag, Im))

    cons = [X >> 0, X[:n, :n] == X[n:, n:], X[n:, :n] == -X[:n, n:],
            p.a * t + inner(p.A) == 1, cp.diag(R) <= t, cp.diag(R) >= 0]
    if p.has_cut:
        w = np.concatenate([p.cut_u.real, p.cut_u.imag])
        cons.append(w @ X @ w >= p.omega * cp.trace(R))
    prob = cp.Problem(cp.Minimize(p.c0 * t + inner(p.C)), cons)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        prob.solve(solver=cp.CLARABEL)
        if prob.status != "optimal":
            # Clarabel stalls on some larger-valued instances; SCS at tight eps is the backup
            prob.solve(solver=cp.SCS, eps=1e-9, max_iters=200_000)
    assert prob.status == "optimal"
    return float(prob.value)


# --- linear algebra ----------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(st.integers(1, 10), st.integers(0, 10_000))
def test_jacobi_matches_lapack(n, seed):
    H = random_hermitian(n, np.random.default_rng(seed))
    np.testing.assert_allclose(jacobi_eigh(H), full_spectrum(H), atol=1e-10 * max(1, np.abs(H).max()))


def test_jacobi_real_known_spectrum():
    S = np.array([[2.0, 1.0], [1.0, 2.0]])
    np.testing.assert_allclose(np.sort(jacobi_eigh_real(S)), [1.0, 3.0], atol=1e-14)


def test_complex_embedding_doubles_spectrum(rng):
    H = random_hermitian(4, rng)
    e = np.sort(np.linalg.eigvalsh(complex_embedding(H)))
    np.testing.assert_allclose(e[::2], full_spectrum(H), atol=1e-12)
    np.testing.assert_allclose(e[1::2], full_spectrum(H), atol=1e-12)


def test_max_eigpair_and_phase(rng):
    H = random_hermitian(5, rng)
    lam, v = max_eigpair(H)
    np.testing.assert_allclose(hermitize(H) @ v, lam * v, atol=1e-12)
    k = np.argmax(np.abs(v))
    assert abs(v[k].imag) < 1e-15 and v[k].real > 0
    w, V = eigh(H)
    assert math.isclose(w[-1], lam, rel_tol=1e-12)


def test_hermitian_wrapper(rng):
    G = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    H = HermitianMatrix(G)
    A = np.asarray(H)
    np.testing.assert_allclose(A, A.conj().T)
    assert H.n == 3
    with pytest.raises(ValueError):
        hermitize(np.ones(3))


# --- problem validation --------------------------------------------------------

def test_problem_validation(rng):
    C, A = random_hermitian(3, rng), random_hermitian(3, rng, psd=True)
    with pytest.raises(ValueError):
        SdpProblem(0.0, C, 1.0, random_hermitian(2, rng))
    with pytest.raises(ValueError):
        SdpProblem(0.0, C, 1.0, A, cut_u=np.ones(3), omega=0.5)  # not unit norm
    with pytest.raises(ValueError):
        SdpProblem(0.0, C, 1.0, A, cut_u=np.ones(3) / math.sqrt(3), omega=1.5)
    p = SdpProblem(0.0, C, 1.0, A).with_cut(np.ones(3) / math.sqrt(3), 0.3)
    assert p.has_cut and not p.without_cut().has_cut


# --- solver against an external oracle ---------------------------------------

@pytest.mark.parametrize("seed", range(8))
def test_objective_matches_clarabel(seed):
    g = np.random.default_rng([77, seed])
    p = random_sdp_instance(int(g.integers(1, 9)), g)
    sol = solve_sdp(p)
    assert sol.ok
    want = clarabel_value(p)
    assert abs(sol.objective_value - want) <= 1e-6 * (1 + abs(want))
    assert max(sol.abs_residuals) <= 1e-6


@pytest.mark.parametrize("seed", range(4))
def test_cut_matches_clarabel(seed):
    g = np.random.default_rng([78, seed])
    n = int(g.integers(2, 7))
    p = random_sdp_instance(n, g)
    u = g.standard_normal(n) + 1j * g.standard_normal(n)
    p = p.with_cut(u / np.linalg.norm(u), float(g.uniform(0.2, 0.95)))
    sol = solve_sdp(p)
    assert sol.ok
    want = clarabel_value(p)
    assert abs(sol.objective_value - want) <= 1e-6 * (1 + abs(want))


def test_badly_scaled_problem_certified():
    # the beamforming instances carry data many orders of magnitude apart
    g = np.random.default_rng(3)
    h = g.standard_normal(8) + 1j * g.standard_normal(8)
    e = g.standard_normal(8) + 1j * g.standard_normal(8)
    p = SdpProblem(3e-8, 2e-9 * np.outer(e, e.conj()), 3e-8, 5e-9 * np.outer(h, h.conj()))
    sol = solve_sdp(p)
    assert sol.ok and max(sol.kkt_residuals) <= 1e-6
    v = p.violations(sol.Phi, sol.t)
    assert v["equality"] <= 1e-6 and v["psd"] <= 1e-9 * max(1.0, sol.t)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**31 - 1))
def test_certificate_and_feasibility(n, seed):
    g = np.random.default_rng(seed)
    p = random_sdp_instance(n, g)
    sol = solve_sdp(p, log_iterates=True)
    assert sol.ok
    assert max(sol.kkt_residuals) <= 1e-6
    assert sol.t >= 0.0
    assert np.linalg.eigvalsh(sol.Phi)[0] >= -1e-8 * max(1.0, sol.t)
    # once iterates are nearly feasible, primal objective bounds the dual from above
    for e in sol.log:
        if e["pinf"] <= 1e-8 and e["dinf"] <= 1e-8:
            assert e["pobj"] >= e["dobj"] - 1e-7 * (1 + abs(e["pobj"]))
        assert e["compl"] >= 0.0


def test_infeasible_instance_has_certificate():
    # -t - tr(Phi) = 1 cannot hold with t >= 0 and Phi PSD
    p = SdpProblem(1.0, np.eye(3), -1.0, -np.eye(3))
    sol = solve_sdp(p)
    assert sol.status == "infeasible"
    assert sol.certificate is not None and sol.certificate["kind"] == "primal"
    assert "worst_row" in sol.certificate


def test_iteration_limit_reports_status(rng):
    p = random_sdp_instance(6, rng)
    sol = solve_sdp(p, max_iter=2)
    assert sol.status in ("max-iter", "stalled") and not sol.ok


def test_dump_roundtrip(tmp_path, rng):
    p = random_sdp_instance(4, rng).with_cut(np.eye(4)[0], 0.5)
    sol = solve_sdp(p)
    f = tmp_path / "p.json"
    dump_problem(p, f, sol)
    doc = json.loads(f.read_text())
    assert doc["solution"]["status"] == "optimal"
    q = load_problem(f)
    np.testing.assert_array_equal(q.C, p.C)
    np.testing.assert_array_equal(q.cut_u, p.cut_u)
    assert q.omega == p.omega
    assert math.isclose(solve_sdp(q).objective_value, sol.objective_value, rel_tol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.integers(0, 10_000), st.booleans())
def test_complex_embedding_preserves_definiteness(n, seed, psd):
    # H is PSD iff its real embedding is PSD
    rng = np.random.default_rng(seed)
    H = random_hermitian(n, rng, psd=psd)
    lam_h = np.linalg.eigvalsh(H)[0]
    lam_e = np.linalg.eigvalsh(complex_embedding(H))[0]
    tol = 1e-10 * max(1.0, np.abs(H).max())
    assert (lam_h >= -tol) == (lam_e >= -tol)
    assert abs(lam_h - lam_e) <= tol


def test_infeasible_certificate_names_the_row():
    p = SdpProblem(1.0, np.eye(3), -1.0, -np.eye(3))
    sol = solve_sdp(p)
    assert sol.certificate["worst_constraint"] == "normalisation"
