"""Print the eta/delta comparison table with measured errors and bounds."""

import argparse
import json

from lse_cond.perturbation_lab import run_experiment, table_configs

COLUMNS = ["eta", "delta", "L_label", "cond_aug", "kappa1", "kappa2", "kappa_inf_rel",
           "kappa_inf_upper", "kappa_c", "kappa_c_upper", "r2", "rinf", "rc",
           "bound_eps1_kappa1", "bound_eps2_kappa2", "bound_eps0_kappa_inf",
           "bound_eps0_kappa_c"]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=1)
    parser.add_argument("--magnitude", type=float, default=1e-8)
    parser.add_argument("--b2-mode", default="spread")
    parser.add_argument("--json", action="store_true", help="dump full rows as JSON")
    args = parser.parse_args()

    rows = run_experiment(table_configs(args.seed, args.b2_mode),
                          magnitude=args.magnitude, trials=args.trials)
    if args.json:
        print(json.dumps([r.to_dict() for r in rows], indent=1, sort_keys=True))
        return
    print(" ".join(f"{c:>12}" for c in COLUMNS))
    for row in rows:
        d = row.to_dict()
        cells = [f"{d[c]:>12}" if isinstance(d[c], str) else f"{d[c]:>12.4g}" for c in COLUMNS]
        print(" ".join(cells))


if __name__ == "__main__":
    main()
