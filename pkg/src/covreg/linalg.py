"""
Small dense symmetric linear algebra.

Everything here works on matrices of modest size (a few dozen rows at most),
which is the regime of covariance matrices of predictors. The routines are
written out rather than delegated so that the singularity gate and the
eigenvalue cut-off are explicit and identical on every platform.

Functions
---------
solve_symmetric
    Cholesky solve with a Bunch-Parlett LDL^t fallback.
inverse_symmetric
    Inverse through ``solve_symmetric`` on the identity.
symmetric_eigen
    Cyclic Jacobi eigendecomposition.
pseudo_inverse_symmetric
    Spectral g-inverse with small eigenvalues zeroed.
invert_partitioned
    Inverse of the augmented cross-product matrix [1 | X]^t [1 | X] assembled
    from the predictor covariance inverse.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from covreg.errors import DimensionMismatch, SingularMatrix

PIVOT_RTOL = 1e-12
PINV_RTOL = 1e-10
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100

# Bunch-Parlett growth constant (1 + sqrt(17)) / 8
_BP_ALPHA = (1.0 + math.sqrt(17.0)) / 8.0


def as_symmetric(a) -> np.ndarray:
    """Return ``a`` as a float square array that is exactly symmetric.

    ``(a + a^t) / 2`` leaves an already symmetric matrix bit-for-bit unchanged.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {a.shape}")
    return 0.5 * (a + a.T)


@dataclass(frozen=True)
class SpectralDecomposition:
    """``a = vectors @ diag(values) @ vectors.T`` with values sorted descending."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


# ---------------------------------------------------------------------------
# Factorizations
# ---------------------------------------------------------------------------

def _cholesky(a: np.ndarray, rtol: float):
    """Lower Cholesky factor, or None if some pivot fails the gate."""
    n = a.shape[0]
    gate = rtol * max(float(np.max(np.diag(a))), 0.0)
    L = np.zeros_like(a)
    for k in range(n):
        row = L[k, :k]
        d = a[k, k] - row @ row
        if not d > gate:
            return None
        L[k, k] = math.sqrt(d)
        if k + 1 < n:
            L[k + 1:, k] = (a[k + 1:, k] - L[k + 1:, :k] @ row) / L[k, k]
    return L


def _bunch_parlett(a: np.ndarray, rtol: float):
    """Symmetric indefinite factorization ``P a P^t = L D L^t``.

    Complete pivoting with 1x1 and 2x2 diagonal blocks. The elimination stops
    with SingularMatrix as soon as every remaining entry of the Schur
    complement is below ``rtol * max|a|``.
    """
    n = a.shape[0]
    w = a.copy()
    L = np.eye(n)
    perm = np.arange(n)
    scale = float(np.max(np.abs(a)))
    blocks = []

    def swap(k, i, j):
        if i == j:
            return
        w[[i, j], :] = w[[j, i], :]
        w[:, [i, j]] = w[:, [j, i]]
        L[[i, j], :k] = L[[j, i], :k]
        perm[[i, j]] = perm[[j, i]]

    k = 0
    while k < n:
        sub = np.abs(w[k:, k:])
        r, s = divmod(int(np.argmax(sub)), n - k)
        mu0 = sub[r, s]
        if not mu0 > rtol * scale:
            raise SingularMatrix(
                f"matrix is numerically singular (rank {k} of {n}, relative tolerance {rtol:g})"
            )
        diag = np.diag(sub)
        i1 = int(np.argmax(diag))
        if diag[i1] >= _BP_ALPHA * mu0:
            swap(k, k, k + i1)
            d = w[k, k]
            col = w[k + 1:, k].copy()
            l = col / d
            w[k + 1:, k + 1:] -= np.outer(l, col)
            L[k + 1:, k] = l
            blocks.append((k, 1))
            k += 1
        else:
            lo, hi = min(r, s), max(r, s)
            swap(k, k, k + lo)
            swap(k, k + 1, k + hi)
            e = w[k:k + 2, k:k + 2]
            det = e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0]
            e_inv = np.array([[e[1, 1], -e[0, 1]], [-e[1, 0], e[0, 0]]]) / det
            c = w[k + 2:, k:k + 2].copy()
            lb = c @ e_inv
            w[k + 2:, k + 2:] -= lb @ c.T
            L[k + 2:, k:k + 2] = lb
            blocks.append((k, 2))
            k += 2
    return perm, L, w, blocks


def _forward_unit(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    z = b.copy()
    for i in range(1, L.shape[0]):
        z[i] -= L[i, :i] @ z[:i]
    return z


def _backward_unit_t(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    # solves L^t x = b for unit lower L
    x = b.copy()
    n = L.shape[0]
    for i in range(n - 2, -1, -1):
        x[i] -= L[i + 1:, i] @ x[i + 1:]
    return x


def _cholesky_solve(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = L.shape[0]
    z = b.copy()
    for i in range(n):
        z[i] = (z[i] - L[i, :i] @ z[:i]) / L[i, i]
    for i in range(n - 1, -1, -1):
        z[i] = (z[i] - L[i + 1:, i] @ z[i + 1:]) / L[i, i]
    return z


def _ldlt_solve(perm, L, w, blocks, b: np.ndarray) -> np.ndarray:
    z = _forward_unit(L, b[perm])
    for k, size in blocks:
        if size == 1:
            z[k] = z[k] / w[k, k]
        else:
            e = w[k:k + 2, k:k + 2]
            det = e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0]
            z0, z1 = z[k].copy(), z[k + 1].copy()
            z[k] = (e[1, 1] * z0 - e[0, 1] * z1) / det
            z[k + 1] = (e[0, 0] * z1 - e[1, 0] * z0) / det
    y = _backward_unit_t(L, z)
    x = np.empty_like(y)
    x[perm] = y
    return x


def solve_symmetric(a, b, rtol: float = PIVOT_RTOL) -> np.ndarray:
    """Solve ``a x = b`` for symmetric ``a``.

    Cholesky is tried first; if a pivot is not above ``rtol`` times the
    largest diagonal entry the solve falls back to a pivoted LDL^t
    factorization, which raises :class:`SingularMatrix` when the matrix is
    numerically rank deficient. ``b`` may be a vector or a matrix of
    right-hand sides.
    """
    a = as_symmetric(a)
    b = np.array(b, dtype=float)
    if b.shape[0] != a.shape[0] or b.ndim not in (1, 2):
        raise DimensionMismatch(f"matrix of order {a.shape[0]} against right-hand side {b.shape}")
    if not np.all(np.isfinite(a)) or not np.all(np.isfinite(b)):
        raise SingularMatrix("non-finite entries in linear system")
    L = _cholesky(a, rtol)
    if L is not None:
        return _cholesky_solve(L, b)
    return _ldlt_solve(*_bunch_parlett(a, rtol), b)


def inverse_symmetric(a, rtol: float = PIVOT_RTOL) -> np.ndarray:
    a = as_symmetric(a)
    inv = solve_symmetric(a, np.eye(a.shape[0]), rtol)
    return 0.5 * (inv + inv.T)


# ---------------------------------------------------------------------------
# Spectral routines
# ---------------------------------------------------------------------------

def symmetric_eigen(a, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> SpectralDecomposition:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius norm drops below
    ``tol * ||a||_F``.
    """
    w = as_symmetric(a)
    n = w.shape[0]
    v = np.eye(n)
    fro = float(np.linalg.norm(w))
    target = tol * fro
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(w[offdiag] ** 2)))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = w[p, q]
                if apq == 0.0:
                    continue
                tau = (w[q, q] - w[p, p]) / (2.0 * apq)
                if tau >= 0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                wp, wq = w[:, p].copy(), w[:, q].copy()
                w[:, p] = c * wp - s * wq
                w[:, q] = s * wp + c * wq
                wp, wq = w[p, :].copy(), w[q, :].copy()
                w[p, :] = c * wp - s * wq
                w[q, :] = s * wp + c * wq
                w[p, q] = w[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    values = np.diag(w).copy()
    order = np.argsort(-values, kind="stable")
    return SpectralDecomposition(values=values[order], vectors=v[:, order])


def pseudo_inverse_symmetric(a, tol_rel: float = PINV_RTOL) -> np.ndarray:
    """g-inverse ``P diag(1/lambda) P^t`` with small eigenvalues zeroed.

    An eigenvalue is inverted when ``|lambda| > tol_rel * max|lambda|`` and
    replaced by zero otherwise. The result satisfies ``a @ g @ a == a``.
    """
    if not 0.0 < tol_rel < 1.0:
        raise ValueError("tol_rel must lie in (0, 1)")
    eig = symmetric_eigen(a)
    lam = eig.values
    cut = tol_rel * float(np.max(np.abs(lam)))
    keep = np.abs(lam) > cut
    inv = np.zeros_like(lam)
    inv[keep] = 1.0 / lam[keep]
    g = (eig.vectors * inv) @ eig.vectors.T
    return 0.5 * (g + g.T)


# ---------------------------------------------------------------------------
# Partitioned inverse
# ---------------------------------------------------------------------------

def invert_partitioned(n: int, xbar, sxx_inv) -> np.ndarray:
    """Inverse of ``X1^t X1`` with ``X1 = [1 | X]`` from sample moments.

    Uses the block formula::

        [[1/n + m S m^t / (n-1),  -m S / (n-1)],
         [-S m^t / (n-1),          S / (n-1)  ]]

    where ``m`` is the row of predictor means and ``S`` the inverse of their
    sample covariance matrix (denominator ``n - 1``).
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    xbar = np.atleast_1d(np.asarray(xbar, dtype=float))
    sxx_inv = as_symmetric(sxx_inv)
    p = xbar.shape[0]
    if sxx_inv.shape[0] != p:
        raise DimensionMismatch(f"{p} means against a {sxx_inv.shape[0]}x{sxx_inv.shape[0]} inverse")
    h = 1.0 / (n - 1)
    ms = sxx_inv @ xbar
    out = np.empty((p + 1, p + 1))
    out[0, 0] = 1.0 / n + h * (xbar @ ms)
    out[0, 1:] = -h * ms
    out[1:, 0] = -h * ms
    out[1:, 1:] = h * sxx_inv
    return out
