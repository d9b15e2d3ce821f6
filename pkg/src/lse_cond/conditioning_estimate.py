"""Upper bounds for the mixed and componentwise condition numbers.

Each bound is a sum of six infinity norms of matrices built from ``K``,
``K K^T`` and ``C_A^dagger``. Every norm is estimated by Hager's one-norm
method (with Higham's safeguards) applied to the transposed matrix, using
only products with the GQR factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .conditioning_exact import as_selection
from .linalg_core import inf_norm

MAX_ITER = 5

TERM_NAMES = (
    "K_Ax",        # ||L K D_{|A||x|}||
    "KKt_Atr",     # ||L K K^T D_{|A^T||r|}||
    "CA_Cx",       # ||L C_A^+ D_{|C||x|}||
    "KKt_Cts",     # ||L K K^T D_{|C^T||(A C_A^+)^T r|}||
    "K_b",         # ||L K D_b||
    "CA_d",        # ||L C_A^+ D_d||
)


@dataclass
class LinearOperator:
    """Matrix-free operator given by its action and the action of its transpose."""

    in_dim: int
    out_dim: int
    forward: Callable[[np.ndarray], np.ndarray]
    adjoint: Callable[[np.ndarray], np.ndarray]

    @classmethod
    def from_matrix(cls, B):
        B = np.asarray(B, dtype=float)
        return cls(B.shape[1], B.shape[0], lambda v: B @ v, lambda u: B.T @ u)

    def transposed(self):
        return LinearOperator(self.out_dim, self.in_dim, self.adjoint, self.forward)

    def to_dense(self):
        return np.column_stack([self.forward(e) for e in np.eye(self.in_dim)]) \
            if self.in_dim else np.zeros((self.out_dim, 0))


@dataclass
class OneNormEstimate:
    value: float
    iterations: int
    applications: int


def _sign(y):
    return np.where(y >= 0.0, 1.0, -1.0)


def one_norm_estimate(op, max_iter=MAX_ITER, detail=False):
    """Lower estimate of ``||B||_1`` for the matrix ``B`` behind ``op``.

    Starts from the uniform vector, alternates ``y = B x`` and
    ``z = B^T sign(y)`` and jumps to the unit vector at ``argmax |z|``
    until ``||z||_inf <= z^T x``, the sign vector repeats, or ``max_iter``
    products with ``B^T`` have been taken. The result is finally compared
    with ``||B x||_1 / ||x||_1`` for an alternating-sign ramp vector.
    """
    n = op.in_dim
    applications = 0

    def fwd(v):
        nonlocal applications
        applications += 1
        return np.asarray(op.forward(v), dtype=float)

    def adj(u):
        nonlocal applications
        applications += 1
        return np.asarray(op.adjoint(u), dtype=float)

    if n == 0 or op.out_dim == 0:
        res = OneNormEstimate(0.0, 0, 0)
        return res if detail else res.value

    x = np.full(n, 1.0 / n)
    y = fwd(x)
    est = np.sum(np.abs(y))
    xi = _sign(y)
    z = adj(xi)
    iterations = 1
    while iterations < max_iter:
        j = int(np.argmax(np.abs(z)))
        if np.abs(z[j]) <= z @ x:
            break
        x = np.zeros(n)
        x[j] = 1.0
        y = fwd(x)
        est_new = np.sum(np.abs(y))
        xi_new = _sign(y)
        if np.array_equal(xi_new, xi) or est_new <= est:
            est = max(est, est_new)
            break
        est, xi = est_new, xi_new
        z = adj(xi)
        iterations += 1

    if n > 1:
        ramp = np.array([(-1.0) ** i * (1.0 + i / (n - 1)) for i in range(n)])
        alt = 2.0 * np.sum(np.abs(fwd(ramp))) / (3.0 * n)
        est = max(est, alt)
    else:
        est = max(est, np.sum(np.abs(fwd(np.ones(1)))))
    res = OneNormEstimate(float(est), iterations, applications)
    return res if detail else res.value


@dataclass
class UpperBoundReport:
    """Per-term estimates of an upper bound and their sum.

    For the mixed bound ``total`` is the sum divided by ``||L x||_inf``;
    for the componentwise bound the scaling is already inside each term.
    """

    kind: str
    terms: dict
    total: float
    iterations: dict = field(default_factory=dict)
    applications: dict = field(default_factory=dict)


def _scaled_factors(solution):
    """The six (left operator, diagonal weight) pairs of the bound."""
    prob, f = solution.problem, solution.factors
    x, r, s = solution.x, solution.r, solution.r_acadag
    absA, absC = np.abs(prob.A), np.abs(prob.C)
    K = (f.apply_K, f.apply_Kt)
    KKt = (f.apply_KKt, f.apply_KKt)
    CA = (f.apply_CAdag, f.apply_CAdag_t)
    return [
        (K, absA @ np.abs(x)),
        (KKt, absA.T @ np.abs(r)),
        (CA, absC @ np.abs(x)),
        (KKt, absC.T @ np.abs(s)),
        (K, np.asarray(prob.b)),
        (CA, np.asarray(prob.d)),
    ]


def bound_operators(solution, L=None, row_scale=None):
    """Operators ``(D_row L M D_w)^T`` whose one-norms are the six terms.

    ``row_scale`` multiplies the rows of ``L`` (``1 / L x`` for the
    componentwise bound).
    """
    L = as_selection(L, solution.x.shape[0])
    if row_scale is not None:
        L = np.asarray(row_scale, dtype=float)[:, None] * L
    ops = []
    for (apply_m, apply_mt), w in _scaled_factors(solution):
        # B = L M D_w (k x len(w)); estimate ||B||_inf = ||B^T||_1
        fwd = (lambda u, mt=apply_mt, w=w: w * mt(L.T @ u))
        adj = (lambda v, m=apply_m, w=w: L @ m(w * v))
        ops.append(LinearOperator(in_dim=L.shape[0], out_dim=w.shape[0],
                                  forward=fwd, adjoint=adj))
    return ops


def _report(kind, ops, divisor=1.0):
    terms, iters, apps = {}, {}, {}
    for name, op in zip(TERM_NAMES, ops):
        est = one_norm_estimate(op, detail=True)
        terms[name] = est.value
        iters[name] = est.iterations
        apps[name] = est.applications
    total = sum(terms.values()) / divisor
    return UpperBoundReport(kind=kind, terms=terms, total=total,
                            iterations=iters, applications=apps)


def kappa_inf_upper(solution, L=None):
    L = as_selection(L, solution.x.shape[0])
    denom = np.max(np.abs(L @ solution.x))
    if denom == 0.0:
        raise ZeroDivisionError("||L x||_inf = 0: mixed upper bound undefined")
    return _report("mixed", bound_operators(solution, L), divisor=denom)


def kappa_c_upper(solution, L=None):
    L = as_selection(L, solution.x.shape[0])
    Lx = L @ solution.x
    if np.any(Lx == 0.0):
        raise ZeroDivisionError("a selected component of L x is zero: componentwise upper bound undefined")
    return _report("componentwise", bound_operators(solution, L, row_scale=1.0 / Lx))


def dense_bound_terms(solution, L=None, componentwise=False):
    """The six infinity norms computed from dense matrices (for checking)."""
    L = as_selection(L, solution.x.shape[0])
    if componentwise:
        L = L / (L @ solution.x)[:, None]
    f = solution.factors
    mats = {"K": f.dense_K(), "KKt": f.dense_KKt(), "CA": f.dense_CAdag()}
    keys = ("K", "KKt", "CA", "KKt", "K", "CA")
    return {name: inf_norm(L @ mats[key] * w[None, :])
            for name, key, (_, w) in zip(TERM_NAMES, keys, _scaled_factors(solution))}
