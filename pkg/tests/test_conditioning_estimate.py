import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lse_cond.conditioning_estimate import (
    MAX_ITER,
    TERM_NAMES,
    LinearOperator,
    bound_operators,
    dense_bound_terms,
    kappa_c_upper,
    kappa_inf_upper,
    one_norm_estimate,
)
from lse_cond.conditioning_exact import condition_numerator, kappa_c, kappa_inf_rel
from lse_cond.linalg_core import one_norm
from lse_cond.lse_solver import LseProblem, solve
from lse_cond.perturbation_lab import SELECTIONS

from oracles import random_problem, random_shape

EXPECTED_UPPER = {"I": (2.002, 4.0), "L1": (4.0, 4.0), "L2": (2.0, 2.0)}

dense = st.tuples(st.integers(1, 12), st.integers(1, 12)).flatmap(
    lambda s: arrays(float, s, elements=st.floats(-10, 10, allow_nan=False)))


def estimate(B, **kw):
    return one_norm_estimate(LinearOperator.from_matrix(B), **kw)


class TestOneNormEstimate:
    def test_identity(self):
        assert estimate(np.eye(5)) == 1.0

    def test_diagonal(self):
        assert estimate(np.diag([1.0, -3.0, 2.0])) == 3.0

    def test_hand_trace(self):
        res = estimate(np.array([[1.0, 2.0], [3.0, 4.0]]), detail=True)
        assert res.value == 6.0
        assert res.iterations == 1

    def test_empty(self):
        assert estimate(np.zeros((0, 3))) == 0.0

    def test_zero_matrix(self):
        assert estimate(np.zeros((3, 4))) == 0.0

    def test_rectangular(self):
        B = np.array([[1.0, -7.0, 0.0], [2.0, 1.0, 0.5]])
        assert estimate(B) == one_norm(B)

    @given(dense)
    def test_never_exceeds(self, B):
        assert estimate(B) <= one_norm(B) * (1 + 1e-12)

    @given(dense)
    def test_application_budget(self, B):
        res = estimate(B, detail=True)
        assert res.applications <= 2 * (MAX_ITER + 1)
        assert 1 <= res.iterations <= MAX_ITER

    def test_deterministic(self, rng):
        B = rng.uniform(-1, 1, (15, 15))
        assert estimate(B) == estimate(B)

    def test_operator_helpers(self, rng):
        B = rng.standard_normal((3, 5))
        op = LinearOperator.from_matrix(B)
        assert np.array_equal(op.to_dense(), B)
        assert np.allclose(op.transposed().to_dense(), B.T)


class TestBoundOperators:
    def test_adjoint_pairs(self, table_solution, rng):
        for op in bound_operators(table_solution, SELECTIONS["L1"]):
            u, v = rng.standard_normal(op.in_dim), rng.standard_normal(op.out_dim)
            lhs, rhs = v @ op.forward(u), op.adjoint(v) @ u
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))

    def test_terms_match_dense(self, table_solution, table_selection):
        _, L = table_selection
        dense_mixed = dense_bound_terms(table_solution, L)
        dense_comp = dense_bound_terms(table_solution, L, componentwise=True)
        mixed = kappa_inf_upper(table_solution, L)
        comp = kappa_c_upper(table_solution, L)
        for name in TERM_NAMES:
            assert mixed.terms[name] == pytest.approx(dense_mixed[name], rel=1e-12, abs=1e-300)
            assert comp.terms[name] == pytest.approx(dense_comp[name], rel=1e-12, abs=1e-300)

    def test_dense_terms_from_scratch(self, table_solution):
        # independent assembly from dense K, KK^T and C_A^+
        sol = table_solution
        f = sol.factors
        A, C = np.abs(sol.problem.A), np.abs(sol.problem.C)
        K, KKt, CA = f.dense_K(), f.dense_KKt(), f.dense_CAdag()
        x, r, s = np.abs(sol.x), np.abs(sol.r), np.abs(sol.r_acadag)
        expected = [np.abs(K) @ (A @ x), np.abs(KKt) @ (A.T @ r), np.abs(CA) @ (C @ x),
                    np.abs(KKt) @ (C.T @ s), np.abs(K) @ np.abs(sol.problem.b),
                    np.abs(CA) @ np.abs(sol.problem.d)]
        terms = dense_bound_terms(sol)
        for name, vecval in zip(TERM_NAMES, expected):
            assert terms[name] == pytest.approx(vecval.max(), rel=1e-13)


class TestUpperBounds:
    def test_table_values(self, model_problem, table_selection):
        label, L = table_selection
        sol = solve(model_problem)
        mixed, comp = EXPECTED_UPPER[label]
        assert kappa_inf_upper(sol, L).total == pytest.approx(mixed, rel=5e-3)
        assert kappa_c_upper(sol, L).total == pytest.approx(comp, rel=1e-10)

    def test_report_fields(self, model_problem):
        rep = kappa_inf_upper(solve(model_problem))
        assert rep.kind == "mixed"
        assert set(rep.terms) == set(TERM_NAMES) == set(rep.iterations) == set(rep.applications)
        assert all(a <= 2 * (MAX_ITER + 1) for a in rep.applications.values())

    def test_zero_guards(self, model_problem, rng):
        with pytest.raises(ZeroDivisionError):
            kappa_inf_upper(solve(model_problem), np.zeros((1, 4)))
        # fully constrained with a zero in d gives an exactly zero component
        sol = solve(LseProblem(rng.standard_normal((4, 3)), np.eye(3), rng.standard_normal(4),
                               np.array([1.0, 0.0, 2.0])))
        with pytest.raises(ZeroDivisionError):
            kappa_c_upper(sol)

    @given(st.integers(0, 2**32 - 1))
    def test_dense_terms_bound_exact(self, seed):
        # the six-term sum is an upper bound whenever the terms are exact
        rng = np.random.default_rng(seed)
        sol = solve(random_problem(rng, *random_shape(rng, 8, 5, 3)))
        mixed = sum(dense_bound_terms(sol).values()) / np.max(np.abs(sol.x))
        assert kappa_inf_rel(sol) <= mixed * (1 + 1e-12)
        if np.all(sol.x):
            comp = sum(dense_bound_terms(sol, componentwise=True).values())
            assert kappa_c(sol) <= comp * (1 + 1e-12)

    def test_no_dense_kronecker(self, rng):
        # a problem too big for n x mn objects still gets bounds
        m, n, p = 400, 60, 10
        sol = solve(random_problem(rng, m, n, p))
        rep = kappa_inf_upper(sol)
        assert np.isfinite(rep.total) and rep.total > 0

    def test_fully_constrained(self, rng):
        d = np.array([1.0, 2.0, -1.0])
        sol = solve(LseProblem(rng.standard_normal((4, 3)), np.eye(3), rng.standard_normal(4), d))
        assert kappa_inf_upper(sol).total == pytest.approx(2.0, rel=1e-12)
        assert kappa_c_upper(sol).total == pytest.approx(2.0, rel=1e-12)
        assert np.allclose(condition_numerator(sol), 2 * np.abs(d))
