"""Equality constrained least squares by the generalized QR factorization.

Problem: minimize ``||A x - b||_2`` subject to ``C x = d`` with
``A`` m x n, ``C`` p x n and ``m + p >= n >= p``.

The factorization is::

    U.T @ A @ Q = [[L11, 0  ],      C @ Q = [S, 0]
                   [L21, L22]]

with row blocks of size ``m - n + p`` and ``n - p`` and column blocks of
size ``p`` and ``n - p``. ``L22`` and ``S`` are lower triangular and are
nonsingular exactly when ``rank(C) = p`` and ``rank([A; C]) = n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .linalg_core import (
    DimensionError,
    SingularMatrixError,
    as_matrix,
    as_vector,
    inf_norm,
    rank_tolerance,
    reverse_ql,
    right_triangularize_rows,
    triangular_solve,
)


class RankConditionError(SingularMatrixError):
    """One of the two rank conditions for a unique LSE solution fails.

    ``condition`` is ``"rank(C) = p"`` or ``"rank([A; C]) = n"``.
    """

    def __init__(self, condition, detail=""):
        self.condition = condition
        msg = f"rank condition {condition} violated"
        super().__init__(f"{msg}: {detail}" if detail else msg)


@dataclass(frozen=True, eq=False)
class GqrFactorization:
    U: np.ndarray
    Q: np.ndarray
    L11: np.ndarray
    L21: np.ndarray
    L22: np.ndarray
    S: np.ndarray

    @property
    def m(self):
        return self.U.shape[0]

    @property
    def n(self):
        return self.Q.shape[0]

    @property
    def p(self):
        return self.S.shape[0]

    @property
    def q(self):
        """Row count ``m - n + p`` of the leading block."""
        return self.L11.shape[0]

    # The operators below never form K or C_A^dagger. Each accepts a vector
    # or a matrix whose columns are transformed independently.

    def apply_K(self, v):
        """``K v`` where ``K = (A P)^dagger``, ``P = I - C^dagger C``."""
        z = triangular_solve(self.L22, self.U[:, self.q:].T @ v)
        return self.Q[:, self.p:] @ z

    def apply_Kt(self, u):
        z = triangular_solve(self.L22, self.Q[:, self.p:].T @ u, transpose=True)
        return self.U[:, self.q:] @ z

    def apply_KKt(self, v):
        z = triangular_solve(self.L22, self.Q[:, self.p:].T @ v, transpose=True)
        return self.Q[:, self.p:] @ triangular_solve(self.L22, z)

    def apply_CAdag(self, v):
        """``C_A^dagger v`` where ``C_A^dagger = (I - K A) C^dagger``."""
        w = triangular_solve(self.S, v)
        y2 = -triangular_solve(self.L22, self.L21 @ w)
        return self.Q @ np.concatenate([w, y2], axis=0)

    def apply_CAdag_t(self, u):
        z = self.Q.T @ u
        t = triangular_solve(self.L22, z[self.p:], transpose=True)
        return triangular_solve(self.S, z[:self.p] - self.L21.T @ t, transpose=True)

    def dense_K(self):
        return self.apply_K(np.eye(self.m))

    def dense_CAdag(self):
        return self.apply_CAdag(np.eye(self.p))

    def dense_KKt(self):
        return self.apply_KKt(np.eye(self.n))


def gqr_factorize(A, C):
    """Compute the generalized QR factorization of the pair ``(A, C)``.

    Raises :class:`RankConditionError` when ``S`` or ``L22`` has a diagonal
    entry below the rank tolerance.
    """
    A = as_matrix(A, "A")
    C = as_matrix(C, "C")
    m, n = A.shape
    p = C.shape[0]
    Q, S = right_triangularize_rows(C)
    tol_c = rank_tolerance(C.shape, inf_norm(C))
    if p and np.min(np.abs(np.diag(S))) <= tol_c:
        raise RankConditionError("rank(C) = p", f"min |S_ii| <= {tol_c:.3e}")
    AQ = A @ Q
    U, L22 = reverse_ql(AQ[:, p:])
    stacked_scale = max(inf_norm(A), inf_norm(C))
    tol_a = rank_tolerance((m + p, n), stacked_scale)
    if n > p and np.min(np.abs(np.diag(L22))) <= tol_a:
        raise RankConditionError("rank([A; C]) = n", f"min |L22_ii| <= {tol_a:.3e}")
    top = U.T @ AQ[:, :p]
    q = m - n + p
    return GqrFactorization(U=U, Q=Q, L11=top[:q].copy(), L21=top[q:].copy(),
                            L22=L22, S=S)


@dataclass(frozen=True, eq=False)
class LseProblem:
    """Data ``(A, C, b, d)``; the rank conditions are verified on construction."""

    A: np.ndarray
    C: np.ndarray
    b: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        C = as_matrix(self.C, "C")
        b = as_vector(self.b, "b")
        d = as_vector(self.d, "d")
        m, n = A.shape
        p = C.shape[0]
        if C.shape[1] != n:
            raise DimensionError(f"C has {C.shape[1]} columns, A has {n}")
        if b.shape[0] != m or d.shape[0] != p:
            raise DimensionError(
                f"b must have length {m} and d length {p}, got {b.shape[0]} and {d.shape[0]}")
        if not (m + p >= n >= p):
            raise DimensionError(f"need m + p >= n >= p, got m={m}, n={n}, p={p}")
        for name, value in zip("ACbd", (A, C, b, d)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        _ = self.factors

    @property
    def shape(self):
        """``(m, n, p)``."""
        return self.A.shape[0], self.A.shape[1], self.C.shape[0]

    @cached_property
    def factors(self):
        return gqr_factorize(self.A, self.C)

    def perturbed(self, dA=0.0, dC=0.0, db=0.0, dd=0.0):
        return LseProblem(self.A + dA, self.C + dC, self.b + db, self.d + dd)


@dataclass(frozen=True, eq=False)
class LseSolution:
    """Solution ``x``, residual ``r = b - A x`` and multipliers ``lam``.

    ``r_acadag`` holds ``(A C_A^dagger)^T r``, which equals ``-lam``.
    ``factors`` is ``None`` for solutions that did not come from the GQR path.
    """

    x: np.ndarray
    r: np.ndarray
    lam: np.ndarray
    problem: LseProblem
    factors: GqrFactorization | None = None
    r_acadag: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.r_acadag is None:
            object.__setattr__(self, "r_acadag", -self.lam)


def solve(problem):
    """Solve the LSE problem with the GQR method."""
    f = problem.factors
    y1 = triangular_solve(f.S, problem.d)
    c = f.U.T @ problem.b
    c1, c2 = c[:f.q], c[f.q:]
    y2 = triangular_solve(f.L22, c2 - f.L21 @ y1)
    x = f.Q @ np.concatenate([y1, y2])
    r = problem.b - problem.A @ x
    # least squares for C^T lam = -A^T r through the orthogonal factor of C^T
    lam = -triangular_solve(f.S, (f.Q.T @ (problem.A.T @ r))[:f.p], transpose=True)
    r_acadag = triangular_solve(f.S, f.L11.T @ (c1 - f.L11 @ y1), transpose=True)
    return LseSolution(x=x, r=r, lam=lam, problem=problem, factors=f, r_acadag=r_acadag)


def build_augmented(problem):
    """The (p + m + n) square matrix acting on ``[lam; r; x]``."""
    A, C = problem.A, problem.C
    m, n, p = problem.shape
    return np.block([
        [np.zeros((p, p)), np.zeros((p, m)), C],
        [np.zeros((m, p)), np.eye(m), A],
        [C.T, A.T, np.zeros((n, n))],
    ])


def augmented_solve(problem):
    """Solve the augmented system densely by LU; independent of the GQR path."""
    m, n, p = problem.shape
    rhs = np.concatenate([problem.d, problem.b, np.zeros(n)])
    try:
        z = np.linalg.solve(build_augmented(problem), rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"augmented matrix is singular: {exc}") from exc
    return LseSolution(x=z[p + m:], r=z[p:p + m], lam=z[:p], problem=problem)
