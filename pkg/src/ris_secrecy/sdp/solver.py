"""Primal-dual interior-point solver for the small fractional-program SDPs.

Problem class (all matrices N x N Hermitian)::

    minimise    c0 * t + <C, Phi>
    subject to  a * t + <A, Phi> = 1
                0 <= Phi[n, n] <= t          n = 1..N
                u^H Phi u >= omega * tr(Phi)  (optional cut, |u| = 1)
                Phi >= 0 (PSD),  t >= 0

It is rewritten in standard conic form with one PSD block ``X = Phi`` and a
nonnegative vector ``x = [t, s_1..s_N, s_cut]`` of slacks. The iteration is an
infeasible-start Mehrotra predictor-corrector using the HKM search direction,
carried out directly in complex arithmetic (the real embedding doubles the
work without changing the iterates). The equality rows split into a couple of
dense rows and N diagonal-selector rows, which keeps the Schur complement at
O(N^3) per iteration.

Convergence and the reported KKT residuals are measured on the equilibrated
problem: every row scaled to unit norm, the variables scaled so that the
normalisation row has unit right-hand side, and the objective scaled to unit
norm. ``abs_residuals`` repeats the check in the caller's units.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, cholesky, solve_triangular

from .linalg import hermitize

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 200
STATUSES = ("optimal", "infeasible", "max-iter")


@dataclass(frozen=True)
class SdpProblem:
    c0: float
    C: np.ndarray
    a: float
    A: np.ndarray
    cut_u: np.ndarray | None = None
    omega: float = 0.0

    def __post_init__(self):
        C, A = hermitize(self.C), hermitize(self.A)
        if C.shape != A.shape:
            raise ValueError(f"C {C.shape} and A {A.shape} differ in size")
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "c0", float(self.c0))
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "omega", float(self.omega))
        if self.cut_u is not None:
            u = np.asarray(self.cut_u, dtype=complex).reshape(-1)
            if u.size != C.shape[0]:
                raise ValueError("cut vector length does not match N")
            nrm = np.linalg.norm(u)
            if abs(nrm - 1.0) > 1e-6:
                raise ValueError(f"cut vector must have unit norm, got {nrm}")
            object.__setattr__(self, "cut_u", u / nrm)
        if not 0.0 <= self.omega <= 1.0:
            raise ValueError("omega must lie in [0, 1]")

    @property
    def n(self) -> int:
        return self.C.shape[0]

    @property
    def has_cut(self) -> bool:
        return self.cut_u is not None

    def with_cut(self, u, omega: float) -> "SdpProblem":
        return replace(self, cut_u=np.asarray(u, dtype=complex), omega=omega)

    def without_cut(self) -> "SdpProblem":
        return replace(self, cut_u=None, omega=0.0)

    def objective(self, Phi, t) -> float:
        return float(self.c0 * t + np.real(np.vdot(self.C, Phi)))

    def violations(self, Phi, t) -> dict:
        """Absolute constraint violations at (Phi, t) in the caller's units."""
        Phi = np.asarray(Phi, dtype=complex)
        diag = np.real(np.diag(Phi))
        out = {
            "equality": abs(self.a * t + float(np.real(np.vdot(self.A, Phi))) - 1.0),
            "box_upper": float(max(0.0, np.max(diag - t))),
            "box_lower": float(max(0.0, -np.min(diag))),
            "t_nonneg": float(max(0.0, -t)),
            "psd": float(max(0.0, -np.linalg.eigvalsh(hermitize(Phi))[0])),
        }
        if self.has_cut:
            u = self.cut_u
            out["cut"] = float(max(0.0, self.omega * np.real(np.trace(Phi))
                                   - np.real(np.vdot(u, Phi @ u))))
        return out


@dataclass
class SdpSolution:
    Phi: np.ndarray
    t: float
    objective_value: float
    status: str
    kkt_residuals: tuple[float, float, float]
    abs_residuals: tuple[float, float, float] = (math.inf, math.inf, math.inf)
    iterations: int = 0
    y: np.ndarray | None = None
    certificate: dict | None = None
    log: list = field(default_factory=list, repr=False)

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


# --- standard form -------------------------------------------------------

@dataclass
class _Form:
    C: np.ndarray        # (N, N) objective on X
    c: np.ndarray        # (p,) objective on x
    Ad: np.ndarray       # (k, N, N) dense rows
    ad: np.ndarray       # (k, p)
    sel: np.ndarray      # (s,) diagonal index of each selector row
    wsel: np.ndarray     # (s,) weight of the selector matrix E_nn
    asel: np.ndarray     # (s, p)
    b: np.ndarray        # (k + s,)

    @property
    def m(self):
        return self.b.size

    def __post_init__(self):
        self._a_lp = np.vstack([self.ad, self.asel])

    def a_lp(self):
        return self._a_lp

    def op(self, X, x):
        """Row values <A_i, X> + a_i . x (X need not be Hermitian)."""
        dense = np.real(np.einsum("kab,ab->k", self.Ad.conj(), X))
        sel = self.wsel * np.real(X[self.sel, self.sel])
        return np.concatenate([dense, sel]) + self.a_lp() @ x

    def adj(self, y):
        k = self.Ad.shape[0]
        S = np.einsum("k,kab->ab", y[:k], self.Ad) if k else np.zeros_like(self.C)
        S = S.copy()
        np.add.at(S, (self.sel, self.sel), self.wsel * y[k:])
        return S, self.a_lp().T @ y


def _standard_form(p: SdpProblem):
    """Build the equilibrated conic form; returns (form, scales)."""
    n = p.n
    cut = p.has_cut
    npl = 1 + n + (1 if cut else 0)
    rows_A, rows_a, b = [p.A], [np.zeros(npl)], [1.0]
    rows_a[0][0] = p.a
    if cut:
        u = p.cut_u
        rows_A.append(np.outer(u, u.conj()) - p.omega * np.eye(n))
        ac = np.zeros(npl)
        ac[-1] = -1.0
        rows_a.append(ac)
        b.append(0.0)
    Ad = np.array(rows_A, dtype=complex)
    ad = np.array(rows_a)
    asel = np.zeros((n, npl))
    asel[:, 0] = -1.0
    asel[np.arange(n), 1 + np.arange(n)] = 1.0
    b = np.concatenate([b, np.zeros(n)])

    r_dense = np.sqrt(np.sum(np.abs(Ad) ** 2, axis=(1, 2)) + np.sum(ad**2, axis=1))
    r_sel = np.sqrt(1.0 + np.sum(asel**2, axis=1))
    r = np.concatenate([r_dense, r_sel])
    if np.any(r == 0):
        raise ValueError("an equality row is identically zero")
    nz = b != 0
    sv = float(np.max(r[nz] / np.abs(b[nz]))) if nz.any() else 1.0
    c = np.zeros(npl)
    c[0] = p.c0
    gamma = max(float(np.linalg.norm(p.C)), abs(p.c0))
    gamma = gamma if gamma > 0 else 1.0

    k = Ad.shape[0]
    form = _Form(p.C / gamma, c / gamma, Ad / r_dense[:, None, None], ad / r_dense[:, None],
                 np.arange(n), 1.0 / r_sel, asel / r_sel[:, None], sv * b / r)
    return form, {"sv": sv, "gamma": gamma, "r": r, "k": k, "npl": npl}


# --- interior-point core ---------------------------------------------------

def _herm(Y):
    return (Y + Y.conj().T) / 2.0


def _inv_herm(Z):
    L = cholesky(Z, lower=True, check_finite=False)
    Li = solve_triangular(L, np.eye(Z.shape[0], dtype=Z.dtype), lower=True,
                          check_finite=False)
    return Li.conj().T @ Li


def _psd_step(X, dX):
    """Largest alpha with X + alpha dX PSD (inf if unbounded)."""
    try:
        L = cholesky(X, lower=True, check_finite=False)
    except LinAlgError:
        return 0.0
    T = solve_triangular(L, dX, lower=True, check_finite=False)
    T = solve_triangular(L, T.conj().T, lower=True, check_finite=False)
    lam = np.linalg.eigvalsh(_herm(T))[0]
    return math.inf if lam >= 0 else -1.0 / lam


def _lp_step(x, dx):
    neg = dx < 0
    return float(np.min(-x[neg] / dx[neg])) if neg.any() else math.inf


def _schur(f: _Form, X, W, ratio):
    k = f.Ad.shape[0]
    sel = f.sel
    m = f.m
    M = np.empty((m, m))
    G = X[None, :, :] @ f.Ad @ W[None, :, :] if k else np.zeros((0,) + X.shape, dtype=complex)
    if k:
        M[:k, :k] = np.real(f.Ad.reshape(k, -1).conj() @ G.reshape(k, -1).T)
        cross = np.real(G[:, sel, sel]) * f.wsel
        M[:k, k:] = cross
        M[k:, :k] = cross.T
    M[k:, k:] = np.real(X[np.ix_(sel, sel)] * W[np.ix_(sel, sel)].T) * np.outer(f.wsel, f.wsel)
    A = f.a_lp()
    M += (A * ratio) @ A.T
    return (M + M.T) / 2.0


def _ipm(f: _Form, tol: float, max_iter: int, log_iterates: bool):
    n = f.C.shape[0]
    p = f.c.size
    nu = n + p
    xi = max(10.0, math.sqrt(nu))
    X = xi * np.eye(n, dtype=complex)
    x = np.full(p, xi)
    Z = xi * np.eye(n, dtype=complex)
    z = np.full(p, xi)
    y = np.zeros(f.m)
    nb = 1.0 + np.linalg.norm(f.b)
    nc = 1.0 + math.sqrt(np.linalg.norm(f.C) ** 2 + np.linalg.norm(f.c) ** 2)
    A_lp = f.a_lp()
    log = []
    status, cert = "max-iter", None
    small_steps = 0
    res = (math.inf, math.inf, math.inf)
    it = 0
    for it in range(max_iter + 1):
        Rp = f.b - f.op(X, x)
        S, s_lp = f.adj(y)
        Rd = f.C - Z - S
        rd = f.c - z - s_lp
        pobj = float(np.real(np.vdot(f.C, X)) + f.c @ x)
        dobj = float(f.b @ y)
        compl = float(np.real(np.vdot(X, Z)) + x @ z)
        mu = compl / nu
        pinf = float(np.linalg.norm(Rp)) / nb
        dinf = math.sqrt(np.linalg.norm(Rd) ** 2 + np.linalg.norm(rd) ** 2) / nc
        gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        res = (pinf, dinf, gap)
        if log_iterates:
            log.append({"iter": it, "pobj": pobj, "dobj": dobj, "compl": compl,
                        "pinf": pinf, "dinf": dinf, "gap": gap})
        if pinf <= tol and dinf <= tol and gap <= tol:
            status = "optimal"
            break
        if it == max_iter:
            break

        # infeasibility certificates
        if dobj > 1e8:
            yh = y / dobj
            Sh, sh = f.adj(yh)
            if np.linalg.eigvalsh(_herm(-Sh))[0] >= -1e-7 and np.min(-sh) >= -1e-7:
                status = "infeasible"
                cert = {"kind": "primal", "y": yh, "aggregated_rhs": float(f.b @ yh),
                        "aggregated_lhs_bound": 0.0}
                break
        if pobj < -1e8:
            Xh, xh = X / -pobj, x / -pobj
            if np.linalg.norm(f.op(Xh, xh)) <= 1e-7:
                status = "infeasible"
                cert = {"kind": "dual", "direction_objective": -1.0,
                        "row_residual": float(np.linalg.norm(f.op(Xh, xh)))}
                break

        try:
            W = _inv_herm(Z)
        except LinAlgError:
            break
        ratio = x / z
        M = _schur(f, X, W, ratio)
        try:
            chol = cho_factor(M, lower=True, check_finite=False)
            solve = lambda h: cho_solve(chol, h, check_finite=False)  # noqa: E731
        except LinAlgError:
            solve = lambda h: np.linalg.lstsq(M, h, rcond=None)[0]  # noqa: E731

        XRdW = X @ Rd @ W

        def direction(sigma, corr_X, corr_x):
            K = sigma * mu * W - X
            klp = sigma * mu / z - x
            if corr_X is not None:
                K = K - _herm(corr_X @ W)
                klp = klp - corr_x / z
            h = Rp - f.op(K - XRdW, np.zeros(p)) - A_lp @ (klp - ratio * rd)
            dy = solve(h)
            Sd, sd = f.adj(dy)
            dZ = Rd - Sd
            dz = rd - sd
            dX = K - _herm(X @ dZ @ W)
            dx = klp - ratio * dz
            return dX, dx, dy, _herm(dZ), dz

        dX, dx, dy, dZ, dz = direction(0.0, None, None)
        ap = min(1.0, _psd_step(X, dX), _lp_step(x, dx))
        ad = min(1.0, _psd_step(Z, dZ), _lp_step(z, dz))
        mu_aff = (float(np.real(np.vdot(X + ap * dX, Z + ad * dZ)))
                  + (x + ap * dx) @ (z + ad * dz)) / nu
        sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3 if mu > 0 else 0.0
        dX, dx, dy, dZ, dz = direction(sigma, dX @ dZ, dx * dz)

        gam = 0.9 + 0.09 * min(ap, ad)
        ap = min(1.0, gam * _psd_step(X, dX), gam * _lp_step(x, dx))
        ad = min(1.0, gam * _psd_step(Z, dZ), gam * _lp_step(z, dz))
        X = _herm(X + ap * dX)
        x = x + ap * dx
        Z = _herm(Z + ad * dZ)
        z = z + ad * dz
        y = y + ad * dy
        small_steps = small_steps + 1 if max(ap, ad) < 1e-6 else 0
        if small_steps >= 5:
            break
    return X, x, y, Z, z, status, cert, res, it, log


def solve_sdp(p: SdpProblem, tol: float = 1e-6, max_iter: int = DEFAULT_MAX_ITER,
              inner_tol: float | None = None, log_iterates: bool = False) -> SdpSolution:
    """Solve ``p``; ``tol`` is the certificate threshold for status optimal.

    The iteration stops at ``inner_tol`` (default ``tol / 100``) so the
    certificate holds with margin; a run that ends between the two is still
    reported optimal.
    """
    inner = tol / 100.0 if inner_tol is None else inner_tol
    f, sc = _standard_form(p)
    X, x, y, Z, z, status, cert, res, iters, log = _ipm(f, inner, max_iter, log_iterates)
    if status == "max-iter" and max(res) <= tol:
        status = "optimal"

    sv, gamma, r = sc["sv"], sc["gamma"], sc["r"]
    Phi = hermitize(X / sv)
    t = float(x[0] / sv)
    y_orig = gamma * y / r
    if cert is not None and cert.get("kind") == "primal":
        cert["y"] = cert["y"] / r
    sol = SdpSolution(Phi, t, p.objective(Phi, t), status, res, iterations=iters,
                      y=y_orig, certificate=cert, log=log)
    sol.abs_residuals = _abs_residuals(p, sol, f, sc, X, x, y)
    if status == "infeasible" and cert is not None:
        row = int(np.argmax(np.abs(f.b - f.op(X, x))))
        cert["worst_row"] = row
        cert["worst_constraint"] = _row_name(p, row)
    return sol


def _row_name(p: SdpProblem, row: int) -> str:
    """Label of a standard-form equality row: normalisation, cut or box[n]."""
    if row == 0:
        return "normalisation"
    if p.has_cut and row == 1:
        return "cut"
    return f"box[{row - (2 if p.has_cut else 1)}]"


def _abs_residuals(p: SdpProblem, sol: SdpSolution, f: _Form, sc, X, x, y):
    """(max primal violation, dual infeasibility, |gap|) in the caller's units."""
    v = p.violations(sol.Phi, sol.t)
    primal = max(v.values())
    # dual slack recomputed from y so that only cone membership is tested
    S, s_lp = f.adj(y)
    Zs = sc["gamma"] * (f.C - S)
    zs = sc["gamma"] * (f.c - s_lp)
    dual = max(0.0, -float(np.linalg.eigvalsh(_herm(Zs))[0]), -float(np.min(zs)))
    dobj = sc["gamma"] / sc["sv"] * float(f.b @ y)
    return primal, dual, abs(sol.objective_value - dobj)


# --- debug dump ------------------------------------------------------------

def _cplx(M):
    M = np.asarray(M, dtype=complex)
    return {"re": M.real.tolist(), "im": M.imag.tolist()}


def dump_problem(p: SdpProblem, path, solution: SdpSolution | None = None) -> None:
    """Write the problem (and optionally the solver outcome) as JSON text."""
    doc = {"n": p.n, "c0": p.c0, "a": p.a, "C": _cplx(p.C), "A": _cplx(p.A),
           "omega": p.omega, "cut_u": None if p.cut_u is None else _cplx(p.cut_u)}
    if solution is not None:
        doc["solution"] = {"status": solution.status, "t": solution.t,
                           "objective": solution.objective_value,
                           "kkt": list(solution.kkt_residuals),
                           "abs": list(solution.abs_residuals),
                           "iterations": solution.iterations}
    Path(path).write_text(json.dumps(doc, indent=1))


def load_problem(path) -> SdpProblem:
    doc = json.loads(Path(path).read_text())
    mat = lambda d: np.array(d["re"]) + 1j * np.array(d["im"])  # noqa: E731
    u = None if doc["cut_u"] is None else mat(doc["cut_u"])
    return SdpProblem(doc["c0"], mat(doc["C"]), doc["a"], mat(doc["A"]), u, doc["omega"])
