"""Train the point-mass toy over several seeds, with and without the
symmetry penalty, and summarize the final tracking errors."""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace

import numpy as np

from humanoid_wbc.toy_ppo import ToyConfig, run_toy_ppo


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--betas", type=float, nargs="+", default=[0.0, 0.5])
    ap.add_argument("--epochs", type=int, default=ToyConfig.epochs)
    ap.add_argument("--out", help="JSON summary path")
    args = ap.parse_args(argv)

    summary = []
    for beta in args.betas:
        for seed in args.seeds:
            t0 = time.perf_counter()
            rep = run_toy_ppo(replace(ToyConfig(), epochs=args.epochs, beta=beta), seed=seed)
            row = {"beta": beta, "seed": seed, "final_error": rep.final_error, "sym_loss": rep.final_sym_loss,
                   "random_error": rep.random_error, "seconds": round(time.perf_counter() - t0, 1)}
            summary.append(row)
            print(json.dumps(row), flush=True)
    for beta in args.betas:
        errs = np.array([r["final_error"] for r in summary if r["beta"] == beta])
        print(f"beta={beta}: final error mean={errs.mean():.4f} max={errs.max():.4f}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(summary, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
