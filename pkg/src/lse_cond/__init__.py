"""Equality constrained least squares with mixed and componentwise conditioning."""

from .conditioning_estimate import (
    LinearOperator,
    UpperBoundReport,
    kappa_c_upper,
    kappa_inf_upper,
    one_norm_estimate,
)
from .conditioning_exact import (
    PerturbationDirection,
    adjoint_apply,
    build_HJ,
    frechet_apply,
    kappa1_cox_higham,
    kappa2_li_wang,
    kappa_2_bound,
    kappa_c,
    kappa_inf,
    kappa_inf_rel,
    selection_matrix,
)
from .lse_solver import (
    GqrFactorization,
    LseProblem,
    LseSolution,
    RankConditionError,
    augmented_solve,
    build_augmented,
    gqr_factorize,
    solve,
)
from .report import ConditionReport, condition_report

__version__ = "0.1.0"
