import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lse_cond.conditioning_exact import kappa_c, kappa_inf, kappa_inf_rel
from lse_cond.linalg_core import cond2
from lse_cond.lse_solver import LseProblem, build_augmented, solve
from lse_cond.perturbation_lab import (
    NULL_ROWS,
    SELECTIONS,
    ExperimentRow,
    PerturbationSample,
    TestProblemConfig,
    brute_force_kappa,
    build_test_problem,
    epsilon0,
    epsilon1,
    epsilon2,
    null_basis_vector,
    relative_errors,
    run_experiment,
    sample_perturbation,
    table_configs,
)

B2_MODES = ["spread"] + [f"e{i + 1}" for i in NULL_ROWS]


def zero_sample(problem):
    m, n, p = problem.shape
    return PerturbationSample(np.zeros((m, n)), np.zeros((p, n)), np.zeros(m), np.zeros(p), 1e-8)


class TestConfig:
    @pytest.mark.parametrize("bad", [0.0, -1.0, 1.5])
    def test_parameter_range(self, bad):
        with pytest.raises(ValueError):
            TestProblemConfig(eta=bad)
        with pytest.raises(ValueError):
            TestProblemConfig(delta=bad)

    def test_unknown_b2(self):
        with pytest.raises(ValueError):
            TestProblemConfig(b2_mode="e1")


class TestConstruction:
    def test_matrix_layout(self):
        prob = build_test_problem(TestProblemConfig(delta=1e-3))
        A = np.zeros((9, 4))
        A[0, 0], A[2, 1], A[6, 2], A[8, 3] = 1.0, 1.0, 1e-3, 1e-3
        assert np.array_equal(prob.A, A)
        assert np.array_equal(prob.C, [[0, 1, 0, 0], [1, 0, 0, 0]])
        assert np.array_equal(prob.d, [1.0, 1.0])

    @pytest.mark.parametrize("mode", B2_MODES)
    def test_null_vector(self, mode):
        b2 = null_basis_vector(mode)
        A = build_test_problem(TestProblemConfig()).A
        assert np.abs(A.T @ b2).max() <= 1e-15
        assert np.linalg.norm(b2) == pytest.approx(1.0, rel=1e-15)

    @pytest.mark.parametrize("mode", B2_MODES)
    def test_solution(self, mode):
        sol = solve(build_test_problem(TestProblemConfig(eta=1e-3, b2_mode=mode)))
        assert np.allclose(sol.x, [1, 1, 1, 1000], rtol=1e-12, atol=0)
        assert np.linalg.norm(sol.r) == pytest.approx(1e-5, rel=1e-9)

    def test_augmented_condition(self):
        prob = build_test_problem(TestProblemConfig(delta=1e-3))
        assert cond2(build_augmented(prob)) == pytest.approx(1.8019e6, rel=1e-3)

    def test_condition_independent_of_b2(self):
        values = []
        for mode in ("spread", "e2"):
            sol = solve(build_test_problem(TestProblemConfig(b2_mode=mode)))
            values.append((kappa_inf_rel(sol), kappa_c(sol)))
        assert np.allclose(values[0], values[1], rtol=1e-12)

    def test_table_configs(self):
        grid = {(c.eta, c.delta) for c in table_configs()}
        assert grid == {(1e-3, 1e-3), (1e-3, 1e-6), (1e-6, 1e-3), (1e-6, 1e-6)}


class TestSampling:
    def test_bounded_by_magnitude(self, model_problem):
        for seed in range(20):
            s = sample_perturbation(model_problem, 1e-8, seed=seed)
            assert epsilon0(model_problem, s) < 1e-8
            assert epsilon1(model_problem, s) < 1e-8

    def test_zero_pattern(self, model_problem):
        s = sample_perturbation(model_problem, 1e-8, seed=3)
        assert np.all(s.dA[model_problem.A == 0] == 0)
        assert np.all(s.dC[model_problem.C == 0] == 0)
        assert np.all(s.db[model_problem.b == 0] == 0)

    def test_same_seed(self, model_problem):
        a = sample_perturbation(model_problem, 1e-8, seed=11)
        b = sample_perturbation(model_problem, 1e-8, seed=11)
        assert np.array_equal(a.direction().to_vector(), b.direction().to_vector())

    def test_different_seed(self, model_problem):
        a = sample_perturbation(model_problem, 1e-8, seed=11)
        b = sample_perturbation(model_problem, 1e-8, seed=12)
        assert not np.array_equal(a.dA, b.dA)

    def test_magnitude_positive(self, model_problem):
        with pytest.raises(ValueError):
            sample_perturbation(model_problem, 0.0, seed=0)


class TestEpsilons:
    def test_zero_sample(self, model_problem):
        s = zero_sample(model_problem)
        assert epsilon0(model_problem, s) == 0.0
        assert epsilon1(model_problem, s) == 0.0
        assert epsilon2(model_problem, s) == 0.0

    def test_proportional(self, model_problem):
        s = zero_sample(model_problem)
        s.dA = 1e-8 * np.array(model_problem.A)
        assert epsilon0(model_problem, s) == pytest.approx(1e-8, rel=1e-15)
        assert epsilon1(model_problem, s) == pytest.approx(1e-8, rel=1e-15)

    def test_single_block_aggregate(self, model_problem):
        s = zero_sample(model_problem)
        s.db = np.array(model_problem.b)
        assert epsilon2(model_problem, s) == pytest.approx(np.linalg.norm(model_problem.b), rel=1e-15)

    def test_weights(self, model_problem):
        s = zero_sample(model_problem)
        s.dd = np.array([3.0, 4.0])
        assert epsilon2(model_problem, s, alphas=(1, 1, 1, 2)) == pytest.approx(10.0)

    def test_pattern_violation(self, model_problem):
        s = zero_sample(model_problem)
        s.dA[1, 1] = 1e-20
        assert epsilon0(model_problem, s) == np.inf

    def test_zero_block(self, rng):
        prob = LseProblem(rng.standard_normal((4, 3)), rng.standard_normal((1, 3)),
                          np.zeros(4), np.ones(1))
        with pytest.raises(ZeroDivisionError):
            epsilon1(prob, zero_sample(prob))


class TestRelativeErrors:
    def test_exact(self):
        assert relative_errors([1.0, 2.0], [1.0, 2.0]) == (0.0, 0.0, 0.0)

    def test_hand_example(self):
        r2, rinf, rc = relative_errors([1.0, 1000.0], [1.0 + 1e-6, 1000.0])
        assert rc == pytest.approx(1e-6, rel=1e-9)
        assert r2 == pytest.approx(1e-9, rel=1e-5)
        assert rinf == pytest.approx(1e-9, rel=1e-9)

    @given(st.lists(st.floats(0.1, 10.0), min_size=1, max_size=6))
    def test_doubling(self, x):
        x = np.array(x)
        assert np.allclose(relative_errors(x, 2 * x), (1.0, 1.0, 1.0), rtol=1e-15)

    def test_selection(self):
        L = np.array([[0.0, 1.0]])
        assert relative_errors([1.0, 2.0], [5.0, 2.0], L) == (0.0, 0.0, 0.0)

    def test_zero_solution(self):
        with pytest.raises(ZeroDivisionError):
            relative_errors([0.0, 0.0], [1.0, 0.0])


class TestExperiment:
    @pytest.fixture(scope="class")
    @classmethod
    def rows(cls):
        return run_experiment(table_configs(), trials=3)

    def test_grid_shape(self, rows):
        assert len(rows) == 12
        assert {r.L_label for r in rows} == set(SELECTIONS)

    def test_exact_columns(self, rows):
        for r in rows:
            assert r.kappa_inf_rel == pytest.approx(2.0, rel=1e-10)
            assert r.kappa_c == pytest.approx(2.0, rel=1e-10)
            expected = 2.0 if r.L_label == "L2" else 4.0
            assert r.kappa_c_upper == pytest.approx(expected, rel=1e-10)

    def test_entries_finite_nonnegative(self, rows):
        for r in rows:
            for key, value in r.to_dict().items():
                if isinstance(value, float):
                    assert math.isfinite(value) and value >= 0.0, key

    def test_first_order_bound(self, rows):
        for r in rows:
            assert r.rinf <= 1.1 * r.kappa_inf_rel * r.eps0
            assert len(r.trial_rinf) == 3

    def test_round_trip(self, rows):
        assert ExperimentRow.from_dict(rows[0].to_dict()) == rows[0]

    def test_reproducible(self, rows):
        again = run_experiment(table_configs()[:1], trials=3)
        assert again[0].to_dict() == rows[0].to_dict()

    def test_trial_count(self):
        with pytest.raises(ValueError):
            run_experiment(table_configs()[:1], trials=0)

    @pytest.mark.parametrize("t", [1e-6, 1e-8, 1e-10])
    def test_bound_tightens(self, t):
        cfg = TestProblemConfig(eta=1e-3, delta=1e-3, seed=5)
        (row,) = run_experiment([cfg], {"I": np.eye(4)}, magnitude=t, trials=100)
        ratio_inf = max(r / (row.kappa_inf_rel * e) for r, e in zip(row.trial_rinf, row.trial_eps0))
        ratio_c = max(r / (row.kappa_c * e) for r, e in zip(row.trial_rc, row.trial_eps0))
        assert ratio_inf <= 1 + 100 * t
        assert ratio_c <= 1 + 100 * t


class TestBruteForce:
    @settings(max_examples=10, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_matches_formulas(self, seed):
        rng = np.random.default_rng(seed)
        prob = LseProblem(rng.standard_normal((3, 2)), rng.standard_normal((1, 2)),
                          rng.standard_normal(3), rng.standard_normal(1))
        sol = solve(prob)
        assert brute_force_kappa(prob) == pytest.approx(kappa_inf(sol), rel=1e-12)
        assert brute_force_kappa(prob, mode="mixed_rel") == pytest.approx(kappa_inf_rel(sol), rel=1e-12)
        assert brute_force_kappa(prob, mode="componentwise") == pytest.approx(kappa_c(sol), rel=1e-12)

    def test_model_problem_sparse(self, model_problem):
        # only 8 nonzero data entries, so enumeration is cheap
        sol = solve(model_problem)
        for L in SELECTIONS.values():
            assert brute_force_kappa(model_problem, L, "mixed_rel") == pytest.approx(
                kappa_inf_rel(sol, L), rel=1e-12)
            assert brute_force_kappa(model_problem, L, "componentwise") == pytest.approx(
                kappa_c(sol, L), rel=1e-12)

    def test_size_guard(self, rng):
        prob = LseProblem(rng.standard_normal((5, 4)), rng.standard_normal((1, 4)),
                          rng.standard_normal(5), rng.standard_normal(1))
        with pytest.raises(ValueError):
            brute_force_kappa(prob)

    def test_zero_solution_guard(self, rng):
        prob = LseProblem(rng.standard_normal((3, 2)), rng.standard_normal((1, 2)),
                          np.zeros(3), np.zeros(1))
        with pytest.raises(ZeroDivisionError):
            brute_force_kappa(prob)

    def test_unknown_mode(self, model_problem):
        with pytest.raises(ValueError):
            brute_force_kappa(model_problem, mode="normwise")
