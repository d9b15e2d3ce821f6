"""Exact condition numbers of a linear function ``L x`` of the LSE solution.

Notation: ``K = (A P)^dagger`` with ``P = I - C^dagger C``,
``CA = C_A^dagger = (I - K A) C^dagger`` and ``s = (A CA)^T r``. The
derivative of ``x`` along a data direction ``(dA, dC, db, dd)`` is::

    -K dA x + K K^T dA^T r - CA dC x - K K^T dC^T s + K db + CA dd

Mixed (``kappa_inf``) and componentwise (``kappa_c``) condition numbers
measure data perturbations relative to each data entry.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .linalg_core import DimensionError, inf_norm, kron, spectral_norm

MAX_DENSE_ENTRIES = 10**6


class ZeroComponentWarning(RuntimeWarning):
    """A selected solution component is zero while its sensitivity is not."""


def selection_matrix(rows, n):
    """0/1 matrix picking the 0-based ``rows`` of an ``n``-vector."""
    rows = list(rows)
    if not rows:
        raise ValueError("selection needs at least one row")
    if min(rows) < 0 or max(rows) >= n:
        raise DimensionError(f"selection rows must lie in [0, {n}), got {rows}")
    L = np.zeros((len(rows), n))
    L[np.arange(len(rows)), rows] = 1.0
    return L


def as_selection(L, n):
    if L is None:
        return np.eye(n)
    L = np.atleast_2d(np.asarray(L, dtype=float))
    if L.ndim != 2 or L.shape[1] != n:
        raise DimensionError(f"selection matrix must have {n} columns, got shape {L.shape}")
    if L.shape[0] < 1:
        raise DimensionError("selection matrix needs at least one row")
    return L


@dataclass
class PerturbationDirection:
    """A point ``(dA, dC, db, dd)`` of the data space."""

    dA: np.ndarray
    dC: np.ndarray
    db: np.ndarray
    dd: np.ndarray

    @classmethod
    def zeros(cls, problem):
        m, n, p = problem.shape
        return cls(np.zeros((m, n)), np.zeros((p, n)), np.zeros(m), np.zeros(p))

    @classmethod
    def from_problem(cls, problem):
        """The data itself, seen as a direction."""
        return cls(np.array(problem.A), np.array(problem.C),
                   np.array(problem.b), np.array(problem.d))

    @classmethod
    def random(cls, problem, rng):
        m, n, p = problem.shape
        return cls(rng.standard_normal((m, n)), rng.standard_normal((p, n)),
                   rng.standard_normal(m), rng.standard_normal(p))

    @classmethod
    def from_vector(cls, v, problem):
        """Inverse of :meth:`to_vector`."""
        m, n, p = problem.shape
        v = np.asarray(v, dtype=float)
        i = np.cumsum([m * n, p * n, m])
        return cls(v[:i[0]].reshape((m, n), order="F"),
                   v[i[0]:i[1]].reshape((p, n), order="F"),
                   v[i[1]:i[2]].copy(), v[i[2]:].copy())

    def to_vector(self):
        """``[vec(dA); vec(dC); db; dd]``."""
        return np.concatenate([self.dA.ravel(order="F"), self.dC.ravel(order="F"),
                               self.db, self.dd])

    def inner(self, other):
        """Trace scalar product on the product space."""
        return float(np.sum(self.dA * other.dA) + np.sum(self.dC * other.dC)
                     + self.db @ other.db + self.dd @ other.dd)

    def __add__(self, other):
        return PerturbationDirection(self.dA + other.dA, self.dC + other.dC,
                                     self.db + other.db, self.dd + other.dd)

    def __mul__(self, t):
        return PerturbationDirection(t * self.dA, t * self.dC, t * self.db, t * self.dd)

    __rmul__ = __mul__

    def hadamard(self, other):
        return PerturbationDirection(self.dA * other.dA, self.dC * other.dC,
                                     self.db * other.db, self.dd * other.dd)


@dataclass
class DerivativeMatrices:
    """Dense ``H`` (n x mn), ``J`` (n x np), ``K`` (n x m) and ``CAdag`` (n x p)."""

    H: np.ndarray
    J: np.ndarray
    K: np.ndarray
    CAdag: np.ndarray


def frechet_apply(solution, L, direction):
    """Derivative of ``L x`` along ``direction``, through the GQR factors."""
    f = solution.factors
    x, r, s = solution.x, solution.r, solution.r_acadag
    L = as_selection(L, x.shape[0])
    dA, dC = direction.dA, direction.dC
    dx = (f.apply_K(direction.db - dA @ x)
          + f.apply_KKt(dA.T @ r - dC.T @ s)
          + f.apply_CAdag(direction.dd - dC @ x))
    return L @ dx


def adjoint_apply(solution, L, u):
    """Adjoint of :func:`frechet_apply`, returned as a direction in data space.

    The ``dC`` slot is p x n, i.e. conformal with ``C``.
    """
    f = solution.factors
    x, r, s = solution.x, solution.r, solution.r_acadag
    L = as_selection(L, x.shape[0])
    w = L.T @ np.asarray(u, dtype=float)
    kkw = f.apply_KKt(w)
    ktw = f.apply_Kt(w)
    cw = f.apply_CAdag_t(w)
    return PerturbationDirection(
        dA=np.outer(r, kkw) - np.outer(ktw, x),
        dC=-(np.outer(cw, x) + np.outer(s, kkw)),
        db=ktw,
        dd=cw,
    )


def _check_size(solution):
    m, n, p = solution.problem.shape
    if m * n > MAX_DENSE_ENTRIES:
        raise MemoryError(f"m*n = {m * n} exceeds the dense limit {MAX_DENSE_ENTRIES}")


def build_HJ(solution):
    _check_size(solution)
    f = solution.factors
    x, r, s = solution.x, solution.r, solution.r_acadag
    K = f.dense_K()
    KKt = f.dense_KKt()
    CA = f.dense_CAdag()
    H = kron(KKt, r[None, :]) - kron(x[None, :], K)
    J = kron(x[None, :], CA) + kron(KKt, s[None, :])
    return DerivativeMatrices(H=H, J=J, K=K, CAdag=CA)


def condition_numerator(solution, L=None):
    """``|L H| vec|A| + |L J| vec|C| + |L K||b| + |L CA||d|`` without forming H, J."""
    f = solution.factors
    prob = solution.problem
    x, r, s = solution.x, solution.r, solution.r_acadag
    L = as_selection(L, x.shape[0])
    LK = L @ f.dense_K()
    LKK = L @ f.dense_KKt()
    LC = L @ f.dense_CAdag()
    absA, absC = np.abs(prob.A), np.abs(prob.C)
    total = np.abs(LK) @ np.abs(prob.b) + np.abs(LC) @ np.abs(prob.d)
    for j in range(x.shape[0]):
        # columns of L H paired with A[:, j]; columns of L J paired with C[:, j]
        block_a = np.outer(LKK[:, j], r) - x[j] * LK
        block_c = x[j] * LC + np.outer(LKK[:, j], s)
        total += np.abs(block_a) @ absA[:, j] + np.abs(block_c) @ absC[:, j]
    return total


def kappa_inf(solution, L=None):
    """Absolute mixed condition number (infinity norm on the output)."""
    return inf_norm(condition_numerator(solution, L))


def kappa_inf_rel(solution, L=None):
    L = as_selection(L, solution.x.shape[0])
    denom = inf_norm(L @ solution.x)
    if denom == 0.0:
        raise ZeroDivisionError("||L x||_inf = 0: relative mixed condition number undefined")
    return kappa_inf(solution, L) / denom


def componentwise_ratio(num, Lx):
    """``max_i num_i / |Lx_i|``, skipping 0/0 and giving inf (with a warning) for c/0."""
    num = np.asarray(num, dtype=float)
    Lx = np.abs(np.asarray(Lx, dtype=float))
    zero = Lx == 0.0
    if np.any(zero & (num > 0.0)):
        warnings.warn("selected component of L x is zero with nonzero sensitivity",
                      ZeroComponentWarning, stacklevel=3)
        return np.inf
    keep = ~zero
    if not np.any(keep):
        return 0.0
    return float(np.max(num[keep] / Lx[keep]))


def kappa_c(solution, L=None):
    """Componentwise condition number."""
    L = as_selection(L, solution.x.shape[0])
    return componentwise_ratio(condition_numerator(solution, L), L @ solution.x)


def kappa_2_bound(solution, L=None):
    """``sqrt(k) * kappa_inf``: upper bound with the 2-norm on the output."""
    L = as_selection(L, solution.x.shape[0])
    return np.sqrt(L.shape[0]) * kappa_inf(solution, L)


def _vec_transpose_columns(X, rows, cols):
    """``X @ Pi`` where ``Pi vec(M) = vec(M.T)`` for ``M`` rows x cols."""
    idx = np.arange(rows * cols).reshape((rows, cols), order="F").ravel(order="C")
    out = np.empty_like(X)
    out[:, idx] = X
    return out


def kappa1_cox_higham(solution):
    """Normwise condition number of ``x`` (relative, 2-norm) of Cox and Higham."""
    _check_size(solution)
    prob, f = solution.problem, solution.factors
    m, n, p = prob.shape
    x, r, s = solution.x, solution.r, solution.r_acadag
    K, KKt, CA = f.dense_K(), f.dense_KKt(), f.dense_CAdag()
    block_c = kron(x[None, :], CA) + _vec_transpose_columns(kron(s[None, :], KKt), p, n)
    block_a = -kron(x[None, :], K) + _vec_transpose_columns(kron(r[None, :], KKt), m, n)
    total = (spectral_norm(CA) * np.linalg.norm(prob.d)
             + spectral_norm(K) * np.linalg.norm(prob.b)
             + spectral_norm(block_c) * np.linalg.norm(prob.C)
             + spectral_norm(block_a) * np.linalg.norm(prob.A))
    return total / np.linalg.norm(x)


def kappa2_li_wang(solution, L=None, alphas=(1.0, 1.0, 1.0, 1.0)):
    """Relative normwise condition number of ``L x`` of Li and Wang.

    ``alphas`` are the positive weights for ``(A, C, b, d)``.
    """
    aA, aC, ab, ad = (float(a) for a in alphas)
    if min(aA, aC, ab, ad) <= 0.0:
        raise ValueError(f"weights must be positive, got {alphas}")
    prob, f = solution.problem, solution.factors
    x, r, s = solution.x, solution.r, solution.r_acadag
    L = as_selection(L, x.shape[0])
    Lx_norm = np.linalg.norm(L @ x)
    if Lx_norm == 0.0:
        raise ZeroDivisionError("||L x||_2 = 0: relative normwise condition number undefined")
    M = f.dense_KKt()
    LM = L @ M
    LCA = L @ f.dense_CAdag()
    cross = np.outer(LM @ x, LCA @ s)
    Kmat = ((r @ r / aA**2 + s @ s / aC**2) * (LM @ LM.T)
            + (x @ x / aA**2 + 1.0 / ab**2) * (LM @ L.T)
            + (x @ x / aC**2 + 1.0 / ad**2) * (LCA @ LCA.T)
            + (cross + cross.T) / aC**2)
    data_norm = np.sqrt(aA**2 * np.sum(prob.A**2) + aC**2 * np.sum(prob.C**2)
                        + ab**2 * (prob.b @ prob.b) + ad**2 * (prob.d @ prob.d))
    return np.sqrt(spectral_norm(Kmat)) / Lx_norm * data_norm
