"""Eigenvalues of small dense real matrices: Hessenberg reduction plus shifted QR.

The matrices handed in here (Jacobi operators of non-metric connections) are
neither symmetric nor necessarily diagonalizable, so the iteration works in
complex arithmetic with a Wilkinson shift and deflates one eigenvalue at a time.
"""

from __future__ import annotations

import numpy as np

from .errors import NonConvergence

_EPS = np.finfo(float).eps


def hessenberg(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Householder reduction ``a = Q H Q^*`` with ``H`` upper Hessenberg."""
    H = np.array(a, dtype=complex)
    n = H.shape[0]
    Q = np.eye(n, dtype=complex)
    for k in range(n - 2):
        x = H[k + 1:, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        H[k + 1:, k:] -= 2.0 * np.outer(v, v.conj() @ H[k + 1:, k:])
        H[:, k + 1:] -= 2.0 * np.outer(H[:, k + 1:] @ v, v.conj())
        Q[:, k + 1:] -= 2.0 * np.outer(Q[:, k + 1:] @ v, v.conj())
        H[k + 2:, k] = 0.0
    return H, Q


def _givens(a: complex, b: complex) -> tuple[float, complex]:
    """(c, s) with [[c, s], [-conj(s), c]] @ [a, b] = [r, 0]."""
    if b == 0:
        return 1.0, 0.0
    if a == 0:
        return 0.0, np.conj(b) / abs(b)
    r = np.hypot(abs(a), abs(b))
    c = abs(a) / r
    s = (a / abs(a)) * np.conj(b) / r
    return c, s


def _wilkinson(H: np.ndarray, hi: int) -> complex:
    a, b, c, d = H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi]
    half = 0.5 * (a - d)
    disc = np.sqrt(half * half + b * c)
    mu1, mu2 = d - half + disc, d - half - disc
    # eigenvalue of the trailing 2x2 closest to its last diagonal entry
    return mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2


def _qr_step(H: np.ndarray, lo: int, hi: int, mu: complex) -> None:
    """One explicit shifted QR sweep on the active block ``H[lo:hi+1, lo:hi+1]``."""
    m = hi - lo + 1
    A = H[lo:hi + 1, lo:hi + 1]
    A -= mu * np.eye(m)
    rots = []
    for k in range(m - 1):
        c, s = _givens(A[k, k], A[k + 1, k])
        rows = A[k:k + 2, k:].copy()
        A[k, k:] = c * rows[0] + s * rows[1]
        A[k + 1, k:] = -np.conj(s) * rows[0] + c * rows[1]
        rots.append((c, s))
    for k, (c, s) in enumerate(rots):
        top = min(k + 2, m)
        cols = A[:top, k:k + 2].copy()
        A[:top, k] = c * cols[:, 0] + np.conj(s) * cols[:, 1]
        A[:top, k + 1] = -s * cols[:, 0] + c * cols[:, 1]
    A += mu * np.eye(m)


def eigenvalues(m: np.ndarray, vectors: bool = False, max_iter: int | None = None):
    """Eigenvalues of ``m`` (complex array), optionally with unit eigenvectors as columns.

    Raises :class:`NonConvergence` when the iteration cap is reached.
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("eigenvalues needs a square matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    n = a.shape[0]
    if n == 0:
        return (np.zeros(0, complex), np.zeros((0, 0), complex)) if vectors else np.zeros(0, complex)
    H, _ = hessenberg(a)
    cap = max_iter if max_iter is not None else 60 * n
    hi, its, total = n - 1, 0, 0
    while hi > 0:
        lo = hi
        while lo > 0:
            scale = abs(H[lo - 1, lo - 1]) + abs(H[lo, lo])
            if scale == 0.0:
                scale = np.linalg.norm(H[max(lo - 1, 0):hi + 1, max(lo - 1, 0):hi + 1])
            if abs(H[lo, lo - 1]) <= _EPS * scale:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            its = 0
            continue
        if total >= cap:
            raise NonConvergence(f"shifted QR did not converge after {total} iterations")
        its += 1
        total += 1
        if its % 11 == 0:
            # exceptional shift to break cycles
            mu = H[hi, hi] + 0.75 * abs(H[hi, hi - 1])
        else:
            mu = _wilkinson(H, hi)
        _qr_step(H, lo, hi, mu)
    lam = np.diag(H).copy()
    if not vectors:
        return lam
    return lam, _inverse_iteration(a, lam)


def _inverse_iteration(a: np.ndarray, lam: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    norm = max(np.linalg.norm(a, 2), 1.0)
    rng = np.random.default_rng(12345)
    V = np.empty((n, n), dtype=complex)
    for j, mu in enumerate(lam):
        shifted = a - (mu + 1e-10 * norm) * np.eye(n)
        v = rng.standard_normal(n) + 0j
        for _ in range(3):
            try:
                v = np.linalg.solve(shifted, v)
            except np.linalg.LinAlgError:
                shifted = shifted + 1e-8 * norm * np.eye(n)
                continue
            v /= np.linalg.norm(v)
        V[:, j] = v
    return V


def sort_spectrum(lam: np.ndarray, decimals: int = 9) -> np.ndarray:
    """Lexicographic order by real then imaginary part (keys rounded to absorb noise)."""
    lam = np.asarray(lam, dtype=complex)
    keys = sorted(range(len(lam)), key=lambda i: (round(lam[i].real, decimals), round(lam[i].imag, decimals)))
    return lam[keys]


def charpoly(m: np.ndarray) -> np.ndarray:
    """Characteristic polynomial coefficients (highest degree first) by Faddeev-LeVerrier."""
    a = np.asarray(m, dtype=float)
    n = a.shape[0]
    coeffs = np.zeros(n + 1)
    coeffs[0] = 1.0
    M = np.zeros_like(a)
    for k in range(1, n + 1):
        M = a @ M + coeffs[k - 1] * np.eye(n)
        coeffs[k] = -np.trace(a @ M) / k
    return coeffs
