"""Command-line entry point.

Every subcommand accepts ``--config FILE``: an INI file whose section named
after the subcommand supplies flag defaults (explicit flags still win).
Exit codes: 0 success, 2 configuration/input error, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import configparser
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import gait as gait_mod
from .commands import CommandRanges, CommandVector, ranges_from_config, sample_command
from .export import REWARD_COLUMNS, export_curves, line_plot_svg, reward_rows, rows_to_csv
from .gait import ContactModelParams, GaitKind, Leg, clock_trace, preset
from .intervention import DatasetTrajectory, dataset_interpolate, run_lengths, simulate_indicator
from .rewards import TERMS, tracking_error
from .rollout import OracleConfig, RolloutLog, run_oracle_rollout
from .swing import SwingProfile, trajectory_table
from .toy_ppo import NumericError, ToyConfig, run_toy_ppo

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class ConfigError(ValueError):
    pass


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _gait(args) -> gait_mod.GaitPreset:
    return preset(args.gait, Leg[args.flying_leg.upper()])


def cmd_clock(args, cfg) -> int:
    rows = clock_trace(_gait(args), args.f, args.cycles, args.dt, ContactModelParams(args.sigma))
    cols = ("t", "phi1", "phi2", "phibar1", "phibar2", "clockL", "clockR", "C1", "C2")
    _emit(rows_to_csv(rows, cols), args.out)
    return EXIT_OK


def cmd_traj(args, cfg) -> int:
    profile = SwingProfile(args.l, args.ps, args.pe)
    rows = trajectory_table(profile, args.n)
    _emit(rows_to_csv(rows, ("phibar", "height", "velocity", "acceleration")), args.out)
    if args.svg:
        x = [r["phibar"] for r in rows]
        Path(args.svg).write_text(line_plot_svg(x, {"height": [r["height"] for r in rows]}, "swing height target"))
    return EXIT_OK


def cmd_sample(args, cfg) -> int:
    ranges = ranges_from_config(cfg) if cfg is not None else CommandRanges()
    rng = np.random.default_rng(args.seed)
    g = _gait(args)
    lines = [json.dumps(sample_command(ranges, g, rng, stage=args.stage).to_dict()) for _ in range(args.n)]
    _emit("".join(line + "\n" for line in lines), args.out)
    return EXIT_OK


def cmd_rollout(args, cfg) -> int:
    g = _gait(args)
    command = CommandVector(vx=args.vx, vy=args.vy, omega=args.omega, f=args.f, l=args.l,
                            h=args.h, p=args.p, w=args.w).with_gait(g)
    config = OracleConfig(gait=g, command=command, steps=args.steps, lag=args.lag, seed=args.seed,
                          dt=args.dt, sigma=args.sigma, p_flip=args.p_flip, alpha=args.alpha,
                          t_interval=args.t_interval)
    log = run_oracle_rollout(config)
    _emit("".join(line + "\n" for line in log.lines()), args.out)
    return EXIT_OK


def _read_log(path: str) -> RolloutLog:
    log = RolloutLog.read_jsonl(path)
    if len(log) == 0:
        raise ConfigError(f"{path} holds no steps")
    return log


def cmd_metrics(args, cfg) -> int:
    log = _read_log(args.log)
    report = tracking_error(log.steps, log.commands)
    _emit(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def cmd_reward(args, cfg) -> int:
    log = _read_log(args.log)
    rows = reward_rows(log)
    Path(args.out).write_text(rows_to_csv(rows, REWARD_COLUMNS))
    n = len(rows)
    lines = [f"{'term':<26}{'group':<16}{'mean':>16}{'sum':>16}{'masked':>8}"]
    for name, group in TERMS.items():
        vals = [r[name] for r in rows]
        masked = sum(1 for r in rows if r["intervention"]) if name == "upper_joint_deviation" else 0
        lines.append(f"{name:<26}{group:<16}{sum(vals) / n:>16.6g}{sum(vals):>16.6g}{masked:>8d}")
    total = [r["total"] for r in rows]
    lines.append(f"{'total':<26}{'':<16}{sum(total) / n:>16.6g}{sum(total):>16.6g}{'':>8}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_intervene(args, cfg) -> int:
    if args.dataset:
        traj = DatasetTrajectory.from_jsonl(args.dataset, args.dataset_rate)
        t = np.arange(traj.timestamps[0], traj.timestamps[-1] + 1e-12, args.dt)
        n_j = traj.frames.shape[1]
        rows = []
        for ti in t:
            a = dataset_interpolate(traj, float(ti))
            rows.append({"t": float(ti), **{f"j{i}": a[i] for i in range(n_j)}})
        _emit(rows_to_csv(rows, ("t", *(f"j{i}" for i in range(n_j)))), args.out)
        return EXIT_OK
    flags = simulate_indicator(args.steps, args.p, np.random.default_rng(args.seed))
    lengths = run_lengths(flags)
    values, counts = np.unique(lengths, return_counts=True)
    rows = [{"run_length": int(v), "count": int(c)} for v, c in zip(values, counts)]
    _emit(rows_to_csv(rows, ("run_length", "count")), args.out)
    if len(lengths):
        sys.stderr.write(f"runs={len(lengths)} mean={lengths.mean():.4f} var={lengths.var():.4f} "
                         f"expected_mean={(1 - args.p) / args.p:.4f}\n")
    return EXIT_OK


def cmd_train_toy(args, cfg) -> int:
    config = replace(ToyConfig(), epochs=args.epochs, beta=args.beta, lr=args.lr)

    def log(row):
        sys.stdout.write(json.dumps(row, sort_keys=True) + "\n")

    try:
        report = run_toy_ppo(config, seed=args.seed, log=log if args.verbose else None)
    except NumericError as exc:
        sys.stderr.write(f"error: {exc}\n")
        if exc.report is not None and args.out:
            Path(args.out).write_text(json.dumps(exc.report.to_dict(), indent=2, sort_keys=True) + "\n")
        return EXIT_NUMERIC
    summary = {k: getattr(report, k) for k in ("initial_error", "random_error", "final_error", "final_sym_loss")}
    sys.stdout.write(json.dumps(summary, sort_keys=True) + "\n")
    if args.out:
        Path(args.out).write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_export(args, cfg) -> int:
    log = _read_log(args.log)
    for path in export_curves(log, args.out_dir, svg=args.svg):
        sys.stdout.write(f"{path}\n")
    return EXIT_OK


def _add_gait(p):
    p.add_argument("--gait", default="walking", choices=[k.value for k in GaitKind])
    p.add_argument("--flying-leg", default="right", choices=["left", "right"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="humanoid-wbc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="INI file; section [%s] sets flag defaults" % name)
        p.set_defaults(func=func)
        return p

    p = add("clock", cmd_clock, "phase/clock/contact CSV over N cycles")
    _add_gait(p)
    p.add_argument("--f", type=float, default=2.0)
    p.add_argument("--sigma", type=float, default=gait_mod.DEFAULT_SIGMA)
    p.add_argument("--dt", type=float, default=gait_mod.DEFAULT_DT)
    p.add_argument("--cycles", type=float, default=2.0)
    p.add_argument("--out")

    p = add("traj", cmd_traj, "swing height target CSV")
    p.add_argument("--l", type=float, default=0.15)
    p.add_argument("--ps", type=float, default=0.0)
    p.add_argument("--pe", type=float, default=0.0)
    p.add_argument("--n", type=int, default=101)
    p.add_argument("--out")
    p.add_argument("--svg")

    p = add("sample-commands", cmd_sample, "JSON Lines of sampled command vectors")
    _add_gait(p)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stage", default="initial", choices=["initial", "finishing"])
    p.add_argument("--out")

    p = add("rollout", cmd_rollout, "oracle-robot rollout log (JSON Lines)")
    _add_gait(p)
    for name, default in (("vx", 0.0), ("vy", 0.0), ("omega", 0.0), ("f", 2.0), ("l", 0.15),
                          ("h", 0.0), ("p", 0.0), ("w", 0.0)):
        p.add_argument(f"--{name}", type=float, default=default)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--lag", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dt", type=float, default=gait_mod.DEFAULT_DT)
    p.add_argument("--sigma", type=float, default=gait_mod.DEFAULT_SIGMA)
    p.add_argument("--p-flip", type=float, default=0.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--t-interval", type=int, default=90)
    p.add_argument("--out")

    p = add("metrics", cmd_metrics, "tracking-error report (JSON) for a rollout log")
    p.add_argument("--log", required=True)
    p.add_argument("--out")

    p = add("reward", cmd_reward, "per-term reward table and breakdown CSV")
    p.add_argument("--log", required=True)
    p.add_argument("--out", default="breakdown.csv")

    p = add("intervene", cmd_intervene, "indicator run-length histogram, or dataset interpolation")
    p.add_argument("--steps", type=int, default=1_000_000)
    p.add_argument("--p", type=float, default=0.005)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dataset", help="JSON Lines trajectory: {\"t\": s, \"joints\": [...]} per line")
    p.add_argument("--dataset-rate", type=float, help="native frame rate; inferred when omitted")
    p.add_argument("--dt", type=float, default=gait_mod.DEFAULT_DT)
    p.add_argument("--out")

    p = add("train-toy", cmd_train_toy, "PPO with the full loss stack on a point mass")
    p.add_argument("--epochs", type=int, default=ToyConfig.epochs)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--beta", type=float, default=ToyConfig.beta)
    p.add_argument("--lr", type=float, default=ToyConfig.lr)
    p.add_argument("--verbose", action="store_true")
    p.add_argument("--out")

    p = add("export", cmd_export, "CSV/SVG curves from a rollout log")
    p.add_argument("--log", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--svg", action="store_true")
    return parser


def _subparser(parser: argparse.ArgumentParser, name: str) -> argparse.ArgumentParser:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def _apply_config(sub: argparse.ArgumentParser, cfg: configparser.ConfigParser, section: str) -> None:
    if not cfg.has_section(section):
        return
    by_dest = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in cfg.items(section):
        dest = key.replace("-", "_")
        action = by_dest.get(dest)
        if action is None or dest in ("help", "config"):
            raise ConfigError(f"[{section}] unknown option {key!r}")
        if isinstance(action, argparse._StoreTrueAction):
            defaults[dest] = cfg.getboolean(section, key)
            continue
        try:
            converted = action.type(value) if action.type else value
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key}: {exc}") from exc
        if action.choices is not None and converted not in action.choices:
            raise ConfigError(f"[{section}] {key}: {converted!r} not in {list(action.choices)}")
        defaults[dest] = converted
    sub.set_defaults(**defaults)


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        pre = parser.parse_args(argv)
        cfg = None
        if pre.config:
            cfg = configparser.ConfigParser()
            if not cfg.read(pre.config):
                raise ConfigError(f"cannot read config file {pre.config}")
            _apply_config(_subparser(parser, pre.command), cfg, pre.command)
            args = parser.parse_args(argv)
        else:
            args = pre
        return args.func(args, cfg)
    except (ConfigError, ValueError, KeyError, OSError, configparser.Error) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
