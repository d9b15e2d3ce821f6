"""How often the one-norm estimator is exact, and how the bounds compare.

Part one draws random uniform matrices and counts exact hits and
overestimates. Part two compares the estimated upper bounds with the exact
condition numbers on random LSE problems.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from lse_cond.conditioning_estimate import (
    LinearOperator,
    kappa_c_upper,
    kappa_inf_upper,
    one_norm_estimate,
)
from lse_cond.conditioning_exact import kappa_c, kappa_inf_rel
from lse_cond.linalg_core import one_norm
from lse_cond.lse_solver import solve

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from oracles import random_problem, random_shape  # noqa: E402


def estimator_hits(rng, trials, max_dim):
    exact = over = 0
    for _ in range(trials):
        m, n = rng.integers(1, max_dim + 1, size=2)
        B = rng.uniform(-1.0, 1.0, (m, n))
        est, norm = one_norm_estimate(LinearOperator.from_matrix(B)), one_norm(B)
        exact += abs(est - norm) <= 1e-12 * norm
        over += est > norm * (1 + 1e-12)
    return exact, over


def bound_ratios(rng, problems):
    mixed, comp = [], []
    for _ in range(problems):
        sol = solve(random_problem(rng, *random_shape(rng, 12, 8, 4)))
        mixed.append(kappa_inf_upper(sol).total / kappa_inf_rel(sol))
        if np.all(sol.x):
            comp.append(kappa_c_upper(sol).total / kappa_c(sol))
    return np.array(mixed), np.array(comp)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--trials", type=int, default=1000)
    parser.add_argument("--max-dim", type=int, default=20)
    parser.add_argument("--problems", type=int, default=100)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    exact, over = estimator_hits(rng, args.trials, args.max_dim)
    print(f"one-norm estimator: exact {exact}/{args.trials} ({exact / args.trials:.1%}), "
          f"overestimates {over}")
    mixed, comp = bound_ratios(rng, args.problems)
    for name, r in (("kappa_inf_upper / kappa_inf_rel", mixed), ("kappa_c_upper / kappa_c", comp)):
        print(f"{name}: min {r.min():.3g} median {np.median(r):.3g} max {r.max():.3g}, "
              f"below one in {(r < 1 - 1e-12).sum()}/{r.size}")


if __name__ == "__main__":
    main()
