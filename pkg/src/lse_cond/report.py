"""Bundled condition-number report for one (problem, selection) pair."""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import conditioning_estimate as est
from . import conditioning_exact as exact

EXACT = "exact"
ESTIMATED = "estimated"
BOUND = "bound"


@dataclass
class ConditionReport:
    """Condition numbers of ``L x``; ``provenance`` tags each value.

    ``None`` marks a value that is undefined for this selection (for
    instance the componentwise bound when ``L x`` has a zero entry).
    """

    k: int
    kappa_inf_rel: float | None = None
    kappa_c: float | None = None
    kappa_2_bound: float | None = None
    kappa_inf_upper: float | None = None
    kappa_c_upper: float | None = None
    kappa1: float | None = None
    kappa2: float | None = None
    componentwise_infinite: bool = False
    provenance: dict = field(default_factory=dict)
    upper_terms: dict = field(default_factory=dict)
    upper_iterations: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


def condition_report(solution, L=None, exact_values=True, estimates=True, alphas=(1, 1, 1, 1)):
    L = exact.as_selection(L, solution.x.shape[0])
    rep = ConditionReport(k=L.shape[0])
    if exact_values:
        if np.any(L @ solution.x):
            rep.kappa_inf_rel = exact.kappa_inf_rel(solution, L)
            rep.kappa2 = exact.kappa2_li_wang(solution, L, alphas)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", exact.ZeroComponentWarning)
            rep.kappa_c = exact.kappa_c(solution, L)
        rep.componentwise_infinite = any(
            issubclass(w.category, exact.ZeroComponentWarning) for w in caught)
        rep.kappa_2_bound = exact.kappa_2_bound(solution, L)
        rep.kappa1 = exact.kappa1_cox_higham(solution)
        rep.provenance.update(kappa_inf_rel=EXACT, kappa_c=EXACT, kappa_2_bound=BOUND,
                              kappa1=EXACT, kappa2=EXACT)
    if estimates:
        Lx = L @ solution.x
        if np.any(Lx):
            mixed = est.kappa_inf_upper(solution, L)
            rep.kappa_inf_upper = mixed.total
            rep.upper_terms["mixed"] = mixed.terms
            rep.upper_iterations["mixed"] = mixed.iterations
        if np.all(Lx):
            comp = est.kappa_c_upper(solution, L)
            rep.kappa_c_upper = comp.total
            rep.upper_terms["componentwise"] = comp.terms
            rep.upper_iterations["componentwise"] = comp.iterations
        rep.provenance.update(kappa_inf_upper=ESTIMATED, kappa_c_upper=ESTIMATED)
    return rep
