"""Command-line front end: ``lse-cond {solve,cond,estimate,experiment,export}``.

Exit codes: 0 success, 2 rank condition failure, 3 input/parse failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .conditioning_exact import selection_matrix
from .linalg_core import SingularMatrixError
from .lse_solver import LseProblem, solve
from .matrix_market import MatrixMarketError, read_matrix, read_vector, write_matrix
from .perturbation_lab import (
    SELECTIONS,
    TestProblemConfig,
    build_test_problem,
    run_experiment,
)
from .report import condition_report

EXIT_OK = 0
EXIT_RANK = 2
EXIT_PARSE = 3

SEED_ENV = "LSE_COND_SEED"

TABLE_COLUMNS = [
    ("eta", "eta"), ("delta", "delta"), ("L", "L_label"), ("cond(Aug)", "cond_aug"),
    ("r2", "r2"), ("kappa1", "kappa1"), ("kappa2", "kappa2"), ("rinf", "rinf"),
    ("kinf", "kappa_inf_rel"), ("kinf_u", "kappa_inf_upper"), ("rc", "rc"),
    ("kc", "kappa_c"), ("kc_u", "kappa_c_upper"),
]


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    A: str | None = None
    C: str | None = None
    b: str | None = None
    d: str | None = None
    selections: list = field(default_factory=list)
    output_format: str = "table"
    seed: int = 0
    magnitude: float = 1e-8
    trials: int = 1
    etas: list = field(default_factory=lambda: [1e-3, 1e-6])
    deltas: list = field(default_factory=lambda: [1e-3, 1e-6])
    b2_mode: str = "spread"
    out_dir: str | None = None


def parse_selection(spec, n):
    """``identity``/``I``, a preset name (``L1``, ``L2``), 1-based rows ``1,2,4`` or a file."""
    if spec in ("identity", "I"):
        return "I", np.eye(n)
    if spec in SELECTIONS:
        L = SELECTIONS[spec]
        if L.shape[1] != n:
            raise UsageError(f"selection preset {spec} needs n = {L.shape[1]}, problem has n = {n}")
        return spec, L
    if Path(spec).is_file():
        L = np.atleast_2d(read_matrix(spec))
        if L.shape[1] != n:
            raise UsageError(f"selection file {spec} has {L.shape[1]} columns, expected {n}")
        return Path(spec).stem, L
    try:
        rows = [int(tok) for tok in spec.split(",")]
    except ValueError:
        raise UsageError(f"cannot interpret selection {spec!r}") from None
    if any(not 1 <= r <= n for r in rows):
        raise UsageError(f"selection rows must lie in [1, {n}], got {spec}")
    return spec, selection_matrix([r - 1 for r in rows], n)


def load_problem(cfg):
    missing = [k for k in "ACbd" if getattr(cfg, k) is None]
    if missing:
        raise UsageError("missing input file(s): " + ", ".join(f"--{k}" for k in missing))
    return LseProblem(read_matrix(cfg.A), read_matrix(cfg.C), read_vector(cfg.b),
                      read_vector(cfg.d))


def _num(v, digits):
    if v is None:
        return "-"
    if isinstance(v, str):
        return v
    return f"{v:.{digits}g}"


def _table(header, rows, digits=5):
    cells = [list(header)] + [[_num(v, digits) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells) + "\n"


def _csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _cmd_solve(cfg):
    prob = load_problem(cfg)
    sol = solve(prob)
    checks = {
        "constraint_residual": float(np.linalg.norm(prob.C @ sol.x - prob.d)),
        "normal_equation_residual": float(np.linalg.norm(prob.A.T @ sol.r + prob.C.T @ sol.lam)),
    }
    if cfg.output_format == "json":
        return _json({"x": sol.x.tolist(), "r": sol.r.tolist(), "lambda": sol.lam.tolist(),
                      **checks})
    blocks = [("x", sol.x), ("r", sol.r), ("lambda", sol.lam)]
    if cfg.output_format == "csv":
        rows = [(name, i + 1, float(v)) for name, vec in blocks for i, v in enumerate(vec)]
        rows += [(k, "", v) for k, v in checks.items()]
        return _csv(["quantity", "index", "value"], rows)
    out = []
    for name, vec in blocks:
        out.append(f"{name} =\n" + "".join(f"  {v:.12g}\n" for v in vec))
    out.extend(f"{k} = {v:.3e}\n" for k, v in checks.items())
    return "".join(out)


def _selections_for(cfg, n):
    specs = cfg.selections or ["identity"]
    return [parse_selection(s, n) for s in specs]


REPORT_FIELDS = {
    "cond": ["kappa_inf_rel", "kappa_c", "kappa_2_bound", "kappa1", "kappa2"],
    "estimate": ["kappa_inf_upper", "kappa_c_upper"],
}


def _cmd_report(cfg):
    prob = load_problem(cfg)
    sol = solve(prob)
    wanted = REPORT_FIELDS[cfg.subcommand]
    estimate = cfg.subcommand == "estimate"
    reports = []
    for label, L in _selections_for(cfg, prob.shape[1]):
        rep = condition_report(sol, L, exact_values=not estimate, estimates=estimate)
        reports.append((label, rep))
    if cfg.output_format == "json":
        return _json([{"L": label, **rep.to_dict()} for label, rep in reports])
    header = ["L"] + wanted
    rows = [[label] + [getattr(rep, k) for k in wanted] for label, rep in reports]
    if cfg.output_format == "csv":
        return _csv(header, rows)
    text = _table(header, rows)
    if estimate:
        for label, rep in reports:
            for kind, terms in rep.upper_terms.items():
                iters = rep.upper_iterations[kind]
                text += f"\n{kind} bound terms, L = {label}:\n"
                text += _table(["term", "estimate", "iterations"],
                               [[name, val, str(iters[name])] for name, val in terms.items()])
    return text


def _cmd_experiment(cfg):
    configs = [TestProblemConfig(eta=eta, delta=delta, b2_mode=cfg.b2_mode, seed=cfg.seed)
               for eta in cfg.etas for delta in cfg.deltas]
    selections = dict(_selections_for(cfg, 4)) if cfg.selections else SELECTIONS
    rows = run_experiment(configs, selections, magnitude=cfg.magnitude, trials=cfg.trials)
    if cfg.output_format == "json":
        return _json([r.to_dict() for r in rows])
    header = [h for h, _ in TABLE_COLUMNS]
    values = [[getattr(r, k) for _, k in TABLE_COLUMNS] for r in rows]
    if cfg.output_format == "csv":
        return _csv(header, values)
    return _table(header, values)


def _cmd_export(cfg):
    if cfg.out_dir is None:
        raise UsageError("export needs --out DIR")
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = []
    for eta in cfg.etas:
        for delta in cfg.deltas:
            prob = build_test_problem(TestProblemConfig(eta, delta, cfg.b2_mode, cfg.seed))
            stem = f"eta{eta:g}_delta{delta:g}"
            for name in "ACbd":
                path = out / f"{stem}_{name}.mtx"
                write_matrix(path, getattr(prob, name), coordinate=name in "AC")
                lines.append(str(path))
    return "\n".join(lines) + "\n"


COMMANDS = {
    "solve": _cmd_solve,
    "cond": _cmd_report,
    "estimate": _cmd_report,
    "experiment": _cmd_experiment,
    "export": _cmd_export,
}


def run(cfg, stdout=None, stderr=None):
    """Execute ``cfg``; returns the process exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        stdout.write(COMMANDS[cfg.subcommand](cfg))
    except SingularMatrixError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_RANK
    except (MatrixMarketError, UsageError, OSError, ValueError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="lse-cond", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def data_args(p):
        for name in "ACbd":
            p.add_argument(f"--{name}", metavar="FILE", help=f"MatrixMarket file with {name}")

    def common(p):
        p.add_argument("--format", dest="output_format", default="table",
                       choices=["table", "json", "csv"])

    def selection(p):
        p.add_argument("--L", dest="selections", action="append", default=[],
                       help="identity | L1 | L2 | 1-based rows '1,2,4' | MatrixMarket file; "
                            "repeatable")

    def grid(p):
        p.add_argument("--eta", dest="etas", type=float, nargs="+", default=[1e-3, 1e-6])
        p.add_argument("--delta", dest="deltas", type=float, nargs="+", default=[1e-3, 1e-6])
        p.add_argument("--b2-mode", default="spread")
        p.add_argument("--seed", type=int, default=int(os.environ.get(SEED_ENV, "0")),
                       help=f"default from ${SEED_ENV}, else 0")

    p = sub.add_parser("solve", help="solve an LSE problem")
    data_args(p)
    common(p)
    for name in ("cond", "estimate"):
        p = sub.add_parser(name, help="exact condition numbers" if name == "cond"
                           else "estimated upper bounds")
        data_args(p)
        selection(p)
        common(p)
    p = sub.add_parser("experiment", help="perturbation study on the eta/delta family")
    selection(p)
    grid(p)
    common(p)
    p.add_argument("--magnitude", type=float, default=1e-8)
    p.add_argument("--trials", type=int, default=1)
    p = sub.add_parser("export", help="write eta/delta test problems as MatrixMarket files")
    grid(p)
    p.add_argument("--out", dest="out_dir", required=True)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    known = RunConfig.__dataclass_fields__
    cfg = RunConfig(**{k: v for k, v in vars(args).items() if k in known})
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
