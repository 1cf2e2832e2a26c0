"""Dense Hermitian helpers.

Production paths call LAPACK through ``numpy.linalg.eigh``; ``jacobi_eigh`` is
an independent cyclic-Jacobi implementation kept as a test oracle.
"""
from __future__ import annotations

import numpy as np


class HermitianMatrix:
    """Complex square matrix symmetrised to (H + H^H) / 2 at construction."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        self.entries = hermitize(entries)
        self.entries.setflags(write=False)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __repr__(self):
        return f"HermitianMatrix(n={self.n})"


def hermitize(H) -> np.ndarray:
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    return (H + H.conj().T) / 2.0


def _fix_phase(v: np.ndarray) -> np.ndarray:
    # rotate so the largest-modulus entry is real positive (deterministic output)
    k = int(np.argmax(np.abs(v)))
    if abs(v[k]) == 0.0:
        return v
    return v * (abs(v[k]) / v[k])


def max_eigpair(H) -> tuple[float, np.ndarray]:
    """Algebraically largest eigenvalue and a unit eigenvector."""
    w, V = np.linalg.eigh(hermitize(H))
    return float(w[-1]), _fix_phase(V[:, -1])


def full_spectrum(H) -> np.ndarray:
    return np.linalg.eigvalsh(hermitize(H))


def eigh(H) -> tuple[np.ndarray, np.ndarray]:
    return np.linalg.eigh(hermitize(H))


def complex_embedding(H) -> np.ndarray:
    """Real symmetric 2N x 2N matrix [[Re, -Im], [Im, Re]]."""
    H = hermitize(H)
    re, im = H.real, H.imag
    return np.block([[re, -im], [im, re]])


def jacobi_eigh_real(S, tol: float = 1e-14, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations."""
    A = np.array(S, dtype=float)
    A = (A + A.T) / 2.0
    n = A.shape[0]
    scale = max(np.linalg.norm(A), 1e-300)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(A, -1) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :], A[q, :] = c * rp - s * rq, s * rp + c * rq
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p], A[:, q] = c * cp - s * cq, s * cp + c * cq
    return np.sort(np.diag(A))


def jacobi_eigh(H, tol: float = 1e-14) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix via Jacobi on its real embedding.

    The embedding carries every eigenvalue twice; one copy of each is kept.
    """
    return jacobi_eigh_real(complex_embedding(H), tol)[::2]
