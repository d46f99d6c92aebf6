"""Sweep the oracle lag time constant and compare the measured height error
with the first-order closed form.

    python scripts/lag_sweep.py --lags 0 0.05 0.1 0.2 --out lag_sweep.csv
"""
from __future__ import annotations

import argparse
import sys

from humanoid_wbc.commands import CommandVector
from humanoid_wbc.export import rows_to_csv
from humanoid_wbc.gait import walking
from humanoid_wbc.rewards import tracking_error
from humanoid_wbc.rollout import OracleConfig, expected_lag_error, run_oracle_rollout


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lags", type=float, nargs="+", default=[0.0, 0.02, 0.05, 0.1, 0.2, 0.5])
    ap.add_argument("--h", type=float, default=-0.1)
    ap.add_argument("--vx", type=float, default=1.0)
    ap.add_argument("--steps", type=int, default=1000)
    ap.add_argument("--out")
    args = ap.parse_args(argv)

    rows = []
    for lag in args.lags:
        cmd = CommandVector(vx=args.vx, h=args.h)
        log = run_oracle_rollout(OracleConfig(walking(), cmd, steps=args.steps, lag=lag))
        rep = tracking_error(log.steps, log.commands)
        closed = expected_lag_error(args.h, lag, log.dt, args.steps)
        rows.append({"lag": lag, "E_h": rep.errors["h"], "E_h_closed": closed,
                     "gap": abs(rep.errors["h"] - closed), "E_vx": rep.errors["vx"],
                     "E_l": rep.errors["l"], "D_cmd": rep.foot_displacement})
    text = rows_to_csv(rows, tuple(rows[0]))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
