"""Perturbation experiments on a family of badly scaled sparse LSE problems.

The family is indexed by ``eta`` (the last solution entry is ``1/eta``)
and ``delta`` (two entries of ``A`` equal ``delta``, which drives the
conditioning of the augmented matrix). Perturbations are relative to each
data entry, so the zero pattern of the data is preserved.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field

import numpy as np

from .conditioning_estimate import kappa_c_upper, kappa_inf_upper
from .conditioning_exact import (
    PerturbationDirection,
    as_selection,
    componentwise_ratio,
    frechet_apply,
    kappa1_cox_higham,
    kappa2_li_wang,
    kappa_c,
    kappa_inf_rel,
)
from .linalg_core import cond2, inf_norm
from .lse_solver import LseProblem, build_augmented, solve

# rows of A that are identically zero: A^T e_i = 0 for these (0-based)
NULL_ROWS = (1, 3, 4, 5, 7)

SELECTIONS = {
    "I": np.eye(4),
    "L1": np.eye(4)[:3],
    "L2": np.eye(4)[3:],
}

MAX_VERTEX_ENTRIES = 20


@dataclass(frozen=True)
class TestProblemConfig:
    eta: float = 1e-3
    delta: float = 1e-3
    b2_mode: str = "spread"
    seed: int = 0

    __test__ = False  # keep pytest from collecting this class

    def __post_init__(self):
        for name in ("eta", "delta"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {value}")
        null_basis_vector(self.b2_mode)


def null_basis_vector(mode):
    """Unit vector ``b2`` with ``A^T b2 = 0``.

    ``"spread"`` averages all five zero rows; ``"e2"``, ``"e4"``, ... picks a
    single one (1-based, as the coordinate name suggests).
    """
    b2 = np.zeros(9)
    if mode == "spread":
        b2[list(NULL_ROWS)] = 1.0 / np.sqrt(len(NULL_ROWS))
        return b2
    if mode.startswith("e") and mode[1:].isdigit() and int(mode[1:]) - 1 in NULL_ROWS:
        b2[int(mode[1:]) - 1] = 1.0
        return b2
    raise ValueError(f"unknown b2 mode {mode!r}; use 'spread' or one of "
                     + ", ".join(f"e{i + 1}" for i in NULL_ROWS))


def build_test_problem(cfg):
    A = np.zeros((9, 4))
    A[0, 0] = 1.0
    A[2, 1] = 1.0
    A[6, 2] = cfg.delta
    A[8, 3] = cfg.delta
    C = np.array([[0.0, 1.0, 0.0, 0.0],
                  [1.0, 0.0, 0.0, 0.0]])
    v = np.array([1.0, 1.0, 1.0, 1.0 / cfg.eta])
    b = A @ v + 1e-5 * null_basis_vector(cfg.b2_mode)
    d = np.ones(2)
    return LseProblem(A, C, b, d)


@dataclass
class PerturbationSample:
    dA: np.ndarray
    dC: np.ndarray
    db: np.ndarray
    dd: np.ndarray
    magnitude: float

    def direction(self):
        return PerturbationDirection(self.dA, self.dC, self.db, self.dd)


def sample_perturbation(problem, magnitude, seed=None, rng=None):
    """Entrywise relative perturbation ``magnitude * U(-1, 1) * data``.

    Blocks are drawn in the order A, C, b, d from one generator.
    """
    if magnitude <= 0.0:
        raise ValueError(f"magnitude must be positive, got {magnitude}")
    if rng is None:
        rng = np.random.default_rng(seed)
    A, C, b, d = problem.A, problem.C, problem.b, problem.d
    return PerturbationSample(
        dA=magnitude * rng.uniform(-1.0, 1.0, A.shape) * A,
        dC=magnitude * rng.uniform(-1.0, 1.0, C.shape) * C,
        db=magnitude * rng.uniform(-1.0, 1.0, b.shape) * b,
        dd=magnitude * rng.uniform(-1.0, 1.0, d.shape) * d,
        magnitude=magnitude,
    )


def _pairs(problem, sample):
    return [(problem.A, sample.dA), (problem.C, sample.dC),
            (problem.b, sample.db), (problem.d, sample.dd)]


def epsilon0(problem, sample):
    """Smallest ``eps`` with ``|Delta| <= eps |data|`` entrywise (inf if impossible)."""
    worst = 0.0
    for data, delta in _pairs(problem, sample):
        data, delta = np.abs(data), np.abs(delta)
        if np.any((data == 0.0) & (delta != 0.0)):
            return np.inf
        nz = data != 0.0
        if np.any(nz):
            worst = max(worst, float(np.max(delta[nz] / data[nz])))
    return worst


def epsilon1(problem, sample):
    """Largest of the four normwise ratios ``||Delta|| / ||data||``."""
    ratios = []
    for name, (data, delta) in zip("ACbd", _pairs(problem, sample)):
        norm = np.linalg.norm(data)
        if norm == 0.0:
            raise ZeroDivisionError(f"||{name}|| = 0: normwise ratio undefined")
        ratios.append(np.linalg.norm(delta) / norm)
    return float(max(ratios))


def epsilon2(problem, sample, alphas=(1.0, 1.0, 1.0, 1.0)):
    """Weighted aggregate ``sqrt(sum alpha^2 ||Delta||^2)``."""
    return float(np.sqrt(sum(a**2 * np.sum(np.asarray(delta) ** 2)
                             for a, (_, delta) in zip(alphas, _pairs(problem, sample)))))


def relative_errors(x, xt, L=None):
    """Normwise (2 and inf) and componentwise relative errors of ``L xt`` vs ``L x``."""
    x = np.asarray(x, dtype=float)
    L = as_selection(L, x.shape[0])
    Lx = L @ x
    err = L @ (np.asarray(xt, dtype=float) - x)
    n2, ninf = np.linalg.norm(Lx), inf_norm(Lx)
    if n2 == 0.0:
        raise ZeroDivisionError("L x = 0: relative errors undefined")
    return (float(np.linalg.norm(err) / n2), float(inf_norm(err) / ninf),
            componentwise_ratio(np.abs(err), Lx))


@dataclass
class ExperimentRow:
    """One (eta, delta, L) line of the comparison table.

    Scalar error and epsilon columns come from the first trial; the
    ``trial_*`` lists hold every trial.
    """

    eta: float
    delta: float
    L_label: str
    b2_mode: str
    seed: int
    magnitude: float
    cond_aug: float
    r2: float
    rinf: float
    rc: float
    kappa1: float
    kappa2: float
    kappa_inf_rel: float
    kappa_inf_upper: float
    kappa_c: float
    kappa_c_upper: float
    eps0: float
    eps1: float
    eps2: float
    bound_eps1_kappa1: float
    bound_eps2_kappa2: float
    bound_eps0_kappa_inf: float
    bound_eps0_kappa_c: float
    trial_r2: list = field(default_factory=list)
    trial_rinf: list = field(default_factory=list)
    trial_rc: list = field(default_factory=list)
    trial_eps0: list = field(default_factory=list)
    trial_eps1: list = field(default_factory=list)
    trial_eps2: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


def run_experiment(configs, selections=None, magnitude=1e-8, trials=1):
    """Solve, perturb and measure every ``(config, selection)`` pair.

    Trial ``t`` of a config uses the ``t``-th draw of
    ``numpy.random.default_rng(cfg.seed)``; all selections share the draws.
    """
    if selections is None:
        selections = SELECTIONS
    if trials < 1:
        raise ValueError("need at least one trial")
    rows = []
    for cfg in configs:
        problem = build_test_problem(cfg)
        sol = solve(problem)
        cond_aug = cond2(build_augmented(problem))
        k1 = kappa1_cox_higham(sol)
        rng = np.random.default_rng(cfg.seed)
        samples = [sample_perturbation(problem, magnitude, rng=rng) for _ in range(trials)]
        perturbed = [solve(problem.perturbed(s.dA, s.dC, s.db, s.dd)).x for s in samples]
        eps = [(epsilon0(problem, s), epsilon1(problem, s), epsilon2(problem, s))
                for s in samples]
        for label, L in selections.items():
            errs = [relative_errors(sol.x, xt, L) for xt in perturbed]
            k2 = kappa2_li_wang(sol, L)
            kinf = kappa_inf_rel(sol, L)
            kc = kappa_c(sol, L)
            e0, e1, e2 = eps[0]
            rows.append(ExperimentRow(
                eta=cfg.eta, delta=cfg.delta, L_label=label, b2_mode=cfg.b2_mode,
                seed=cfg.seed, magnitude=magnitude, cond_aug=cond_aug,
                r2=errs[0][0], rinf=errs[0][1], rc=errs[0][2],
                kappa1=k1, kappa2=k2, kappa_inf_rel=kinf,
                kappa_inf_upper=kappa_inf_upper(sol, L).total,
                kappa_c=kc, kappa_c_upper=kappa_c_upper(sol, L).total,
                eps0=e0, eps1=e1, eps2=e2,
                bound_eps1_kappa1=e1 * k1, bound_eps2_kappa2=e2 * k2,
                bound_eps0_kappa_inf=e0 * kinf, bound_eps0_kappa_c=e0 * kc,
                trial_r2=[e[0] for e in errs], trial_rinf=[e[1] for e in errs],
                trial_rc=[e[2] for e in errs],
                trial_eps0=[e[0] for e in eps], trial_eps1=[e[1] for e in eps],
                trial_eps2=[e[2] for e in eps],
            ))
    return rows


def table_configs(seed=0, b2_mode="spread"):
    """The four (eta, delta) combinations of the reference table."""
    return [TestProblemConfig(eta=eta, delta=delta, b2_mode=b2_mode, seed=seed)
            for eta in (1e-3, 1e-6) for delta in (1e-3, 1e-6)]


def brute_force_kappa(problem, L=None, mode="mixed"):
    """Condition number as an explicit maximum over sign vertices.

    Every data entry ``u_t`` that is nonzero becomes ``sigma_t |u_t|`` and
    the derivative of ``L x`` is evaluated along each of the
    ``2^(#nonzeros)`` vertices. ``mode`` is ``"mixed"`` (absolute, inf-norm),
    ``"mixed_rel"`` (divided by ``||L x||_inf``) or ``"componentwise"``.
    """
    if mode not in ("mixed", "mixed_rel", "componentwise"):
        raise ValueError(f"unknown mode {mode!r}")
    sol = solve(problem)
    L = as_selection(L, sol.x.shape[0])
    data = PerturbationDirection.from_problem(problem).to_vector()
    support = np.flatnonzero(data)
    N = support.size
    if N > MAX_VERTEX_ENTRIES:
        raise ValueError(f"{N} nonzero data entries; vertex enumeration limited to "
                         f"{MAX_VERTEX_ENTRIES}")
    Lx = L @ sol.x
    if not np.any(Lx):
        raise ZeroDivisionError("L x = 0: the vertex maximum is not normalizable")
    if N == 0:
        return 0.0
    G = np.empty((L.shape[0], N))
    for col, t in enumerate(support):
        e = np.zeros(data.shape[0])
        e[t] = abs(data[t])
        G[:, col] = frechet_apply(sol, L, PerturbationDirection.from_vector(e, problem))
    # sigma and -sigma give the same norms, so fix the first sign
    row_max = np.zeros(L.shape[0])
    for tail in _sign_chunks(N - 1):
        sigma = np.vstack([np.ones((1, tail.shape[1])), tail])
        row_max = np.maximum(row_max, np.abs(G @ sigma).max(axis=1))
    if mode == "componentwise":
        return componentwise_ratio(row_max, Lx)
    best = float(row_max.max())
    if mode == "mixed_rel":
        return best / inf_norm(Lx)
    return best


def _sign_chunks(N, chunk=1 << 14):
    """All sign vectors in ``{-1, 1}^N`` as columns, a chunk at a time."""
    if N == 0:
        yield np.ones((0, 1))
        return
    patterns = itertools.product((1.0, -1.0), repeat=N)
    while True:
        block = list(itertools.islice(patterns, chunk))
        if not block:
            return
        yield np.array(block).T
