"""Dense real linear algebra used throughout the package.

Matrices are plain ``numpy`` float arrays. ``vec`` stacks columns, so every
Kronecker identity below is the usual column-major one.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

EPS = np.finfo(float).eps


class DimensionError(ValueError):
    """Raised when operands have incompatible or unsupported shapes."""


class SingularMatrixError(ArithmeticError):
    """Raised when a matrix is numerically singular at the working tolerance."""


def as_matrix(M, name="matrix"):
    """Convert ``M`` to a finite 2-D float array (copy-free when possible)."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def as_vector(v, name="vector"):
    v = np.asarray(v, dtype=float)
    if v.ndim == 2 and 1 in v.shape:
        v = v.ravel()
    if v.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    return v


def rank_tolerance(shape, scale):
    """Threshold below which a pivot or singular value counts as zero."""
    return max(shape) * EPS * scale


def householder_qr(M):
    """Full QR factorization ``M = Q @ R`` by Householder reflections.

    Returns ``Q`` (rows x rows, orthogonal) and ``R`` (rows x cols, upper
    triangular). Diagonal entries of ``R`` are made nonnegative so the
    factors are reproducible.
    """
    R = np.array(as_matrix(M), dtype=float)
    m, n = R.shape
    if m < n:
        raise DimensionError(f"householder_qr needs rows >= cols, got {m}x{n}")
    Q = np.eye(m)
    for j in range(n):
        x = R[j:, j]
        normx = np.linalg.norm(x)
        if normx == 0.0:
            continue
        v = x.copy()
        v[0] += np.copysign(normx, x[0])
        v /= np.linalg.norm(v)
        R[j:, j:] -= 2.0 * np.outer(v, v @ R[j:, j:])
        Q[:, j:] -= 2.0 * np.outer(Q[:, j:] @ v, v)
        R[j + 1:, j] = 0.0
    signs = np.where(np.diag(R) < 0.0, -1.0, 1.0)
    R[:n] *= signs[:, None]
    Q[:, :n] *= signs
    return Q, R


def right_triangularize_rows(C):
    """Orthogonal ``Q`` with ``C @ Q = [S, 0]``, ``S`` lower triangular.

    Obtained from the QR factorization of ``C.T``: if ``C.T = Q R`` then
    ``C Q = R.T``.
    """
    C = as_matrix(C, "C")
    p, n = C.shape
    if p > n:
        raise DimensionError(f"need p <= n to triangularize rows, got {p}x{n}")
    Q, R = householder_qr(C.T)
    return Q, R[:p].T.copy()


def reverse_ql(M):
    """QL factorization ``M = U @ [0; L]`` with ``L`` square lower triangular.

    ``M`` is rows x cols with rows >= cols; computed by a QR of the matrix
    with both rows and columns reversed.
    """
    M = as_matrix(M)
    m, k = M.shape
    if m < k:
        raise DimensionError(f"reverse_ql needs rows >= cols, got {m}x{k}")
    Qf, Rf = householder_qr(M[::-1, ::-1])
    U = Qf[::-1, ::-1].copy()
    L = Rf[:k][::-1, ::-1].copy()
    return U, L


def triangular_solve(T, rhs, lower=True, transpose=False):
    """Solve ``T y = rhs`` (or ``T.T y = rhs``) for triangular ``T``.

    Raises :class:`SingularMatrixError` when a diagonal entry is at or below
    ``n * eps * ||T||_inf``.
    """
    T = np.asarray(T, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise DimensionError(f"triangular matrix must be square, got {T.shape}")
    n = T.shape[0]
    if rhs.shape[0] != n:
        raise DimensionError(f"rhs has {rhs.shape[0]} rows, expected {n}")
    if n == 0:
        return np.zeros_like(rhs)
    tol = rank_tolerance(T.shape, inf_norm(T))
    small = np.flatnonzero(np.abs(np.diag(T)) <= tol)
    if small.size:
        raise SingularMatrixError(
            f"triangular matrix is singular: |T[{small[0]},{small[0]}]| <= {tol:.3e}")
    return solve_triangular(T, rhs, lower=lower, trans=1 if transpose else 0,
                            check_finite=False)


def vec(M):
    """Stack the columns of ``M`` into one vector."""
    return np.asarray(M, dtype=float).ravel(order="F")


def unvec(v, rows, cols):
    return np.asarray(v, dtype=float).reshape((rows, cols), order="F")


def kron(A, B):
    return np.kron(np.asarray(A, dtype=float), np.asarray(B, dtype=float))


def diag_of(v):
    return np.diag(np.asarray(v, dtype=float).ravel())


def vec_permutation(rows, cols):
    """Permutation ``Pi`` with ``Pi @ vec(M) == vec(M.T)`` for ``M`` rows x cols."""
    N = rows * cols
    perm = np.arange(N).reshape((rows, cols), order="F").ravel(order="C")
    Pi = np.zeros((N, N))
    Pi[np.arange(N), perm] = 1.0
    return Pi


def one_norm(M):
    """Max absolute column sum (plain absolute sum for a vector)."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0.0
    if M.ndim == 1:
        return float(np.sum(np.abs(M)))
    return float(np.max(np.sum(np.abs(M), axis=0)))


def inf_norm(M):
    """Max absolute row sum (max absolute entry for a vector)."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0.0
    if M.ndim == 1:
        return float(np.max(np.abs(M)))
    return one_norm(M.T)


def frobenius_norm(M):
    return float(np.linalg.norm(np.asarray(M, dtype=float)))


def singular_values(M):
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return np.zeros(0)
    return np.linalg.svd(M, compute_uv=False)


def spectral_norm(M):
    """Largest singular value; Euclidean length for a vector."""
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        return float(np.linalg.norm(M))
    s = singular_values(M)
    return float(s[0]) if s.size else 0.0


def cond2(M):
    """2-norm condition number ``s_max / s_min`` of a square matrix."""
    s = singular_values(M)
    if s.size == 0:
        return 1.0
    return float(s[0] / s[-1]) if s[-1] > 0 else np.inf


def pseudo_inverse(M):
    """Moore-Penrose inverse with rank decided by :func:`rank_tolerance`."""
    M = as_matrix(M)
    m, n = M.shape
    if M.size == 0:
        return np.zeros((n, m))
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    keep = s > rank_tolerance(M.shape, s[0])
    return (Vt[keep].T / s[keep]) @ U[:, keep].T
