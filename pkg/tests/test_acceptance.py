"""Acceptance gate: twelve criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines, or
``python tests/test_acceptance.py`` for a standalone summary.
"""
from __future__ import annotations

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from reward_fixtures import fixtures  # noqa: E402

from humanoid_wbc import cli  # noqa: E402
from humanoid_wbc.commands import CommandVector, update_noise_alpha  # noqa: E402
from humanoid_wbc.gait import (  # noqa: E402
    ContactModelParams, PhaseState, advance_phase, clock_trace, contact_probability, jumping,
    standing, walking,
)
from humanoid_wbc.intervention import interpolation_ratio, run_lengths, simulate_indicator  # noqa: E402
from humanoid_wbc.layout import h1_layout  # noqa: E402
from humanoid_wbc.learn import observations as ob  # noqa: E402
from humanoid_wbc.learn.nets import (  # noqa: E402
    Batch, LossConfig, NetSpec, init_params, loss_and_grad, micro_net_forward_backward,
)
from humanoid_wbc.mirror import MirrorMap, command_map, joint_map, proprio_map, symmetry_loss  # noqa: E402
from humanoid_wbc.rewards import compute_rewards, tracking_error  # noqa: E402
from humanoid_wbc.robot_step import RobotStep  # noqa: E402
from humanoid_wbc.rollout import OracleConfig, expected_lag_error, run_oracle_rollout  # noqa: E402
from humanoid_wbc.swing import (  # noqa: E402
    SwingProfile, evaluate_oracle, solve_quintic_oracle, target_derivatives, target_height,
)
from humanoid_wbc.toy_ppo import ToyConfig, run_toy_ppo  # noqa: E402

RESULTS: dict[int, bool] = {}


def report(n: int, title: str, ok: bool, detail: str = "") -> None:
    RESULTS[n] = bool(ok)
    print(f"[{'PASS' if ok else 'FAIL'}] AC{n:02d} {title}" + (f" :: {detail}" if detail else ""))
    assert ok, f"AC{n:02d} {title}: {detail}"


def test_ac01_quintic_boundary_conditions():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst_bc, worst_fd = 0.0, 0.0
    h = 1e-6
    for _ in range(50):
        prof = SwingProfile(rng.uniform(0.05, 0.4), rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05))
        for pb in (0.5, 0.75, 1.0):
            v, a = target_derivatives(pb, prof)
            worst_bc = max(worst_bc, abs(v), abs(a))
        # central differences inside each segment against the analytic derivatives
        for pb in np.linspace(0.51, 0.99, 25):
            if abs(pb - 0.75) < 2e-3:
                continue
            v, a = target_derivatives(pb, prof)
            fp, f0, fm = (target_height(pb + h, prof), target_height(pb, prof), target_height(pb - h, prof))
            worst_fd = max(worst_fd, abs((fp - fm) / (2 * h) - v))
            vp, _ = target_derivatives(pb + h, prof)
            vm, _ = target_derivatives(pb - h, prof)
            worst_fd = max(worst_fd, abs((vp - vm) / (2 * h) - a))
    dt = time.perf_counter() - t0
    report(1, "quintic boundary conditions", worst_bc < 1e-9 and worst_fd < 1e-4 and dt < 1.0,
           f"max |v|,|a| at boundaries={worst_bc:.2e}, max FD gap={worst_fd:.2e}, {dt:.3f}s")


def test_ac02_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    grid = np.linspace(0.0, 1.0, 1001)
    worst = 0.0
    for _ in range(200):
        prof = SwingProfile(rng.uniform(0.05, 0.4), rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05))
        closed = target_height(grid, prof)
        oracle = evaluate_oracle(grid, solve_quintic_oracle(prof))
        worst = max(worst, float(np.max(np.abs(closed - oracle))))
    dt = time.perf_counter() - t0
    report(2, "closed form vs 6x6 linear solve", worst < 1e-9 and dt < 5.0,
           f"max gap={worst:.2e} m over 200x1001, {dt:.3f}s")


def test_ac03_contact_model():
    p = ContactModelParams(0.02)
    grid = np.linspace(0.0, 1.0, 100001)
    c = contact_probability(grid, p)
    in_range = bool(np.all((c >= 0.0) & (c <= 1.0)))
    c25, c50, c75 = (contact_probability(x, p) for x in (0.25, 0.5, 0.75))
    ok = in_range and c25 > 0.999 and abs(c50 - 0.5) <= 1e-6 and c75 < 0.001
    report(3, "contact probability model", ok,
           f"range ok={in_range}, C(.25)={c25:.9f}, C(.5)={c50:.9f}, C(.75)={c75:.2e}")


def test_ac04_gait_clocks():
    walk = clock_trace(walking(), 2.0, 20)
    anti = max(abs(r["clockL"] + r["clockR"]) for r in walk)
    # right clock equals the left clock shifted half a cycle
    ident = max(abs(r["clockR"] - math.sin(2 * math.pi * ((r["phibar1"] + 0.5) % 1.0))) for r in walk)
    offset = max(abs(((r["phi2"] - r["phi1"]) % 1.0) - 0.5) for r in walk)
    jump = clock_trace(jumping(), 2.0, 20)
    same = max(abs(r["clockL"] - r["clockR"]) for r in jump)
    stand = clock_trace(standing(), 2.0, 5)
    flat = max(max(abs(r["clockL"] - 1.0), abs(r["clockR"] - 1.0)) for r in stand)
    s = advance_phase(PhaseState((0.98, 0.48), 2.0, 0.02, walking()))
    wrap_err = max(abs(s.phi[0] - 0.02), abs(s.phi[1] - 0.52))
    in_unit = all(0.0 <= r["phi1"] < 1.0 and 0.0 <= r["phi2"] < 1.0 for r in walk)
    ok = anti < 1e-12 and ident < 1e-12 and offset < 1e-12 and same == 0.0 and flat == 0.0 \
        and wrap_err < 1e-12 and in_unit
    report(4, "gait clocks", ok,
           f"anti-phase={anti:.1e}, shift identity={ident:.1e}, offset drift={offset:.1e}, jumping gap={same}, "
           f"standing gap={flat}, wrap err={wrap_err:.1e}")


def test_ac05_reward_fixtures():
    fx = fixtures()
    worst, bad = 0.0, []
    for f in fx:
        b = compute_rewards(f.step, f.cmd, contact_probs=f.contact)
        for name, value in f.contributions().items():
            worst = max(worst, abs(b[name].contribution - value))
            if abs(b[name].contribution - value) > 1e-12:
                bad.append(f"{f.name}:{name}")
        if sorted(k for k in b.terms if b[k].masked) != sorted(f.masked):
            bad.append(f"{f.name}:mask")
        worst = max(worst, abs(b.total - f.total))
    names = {f.name for f in fx}
    ok = len(fx) >= 10 and not bad and worst <= 1e-12 and "termination" in names \
        and "upper_deviation_0.3_masked" in names
    report(5, "reward fixtures", ok, f"{len(fx)} fixtures, max gap={worst:.1e}, failures={bad}")


def test_ac06_intervention_statistics():
    flags = simulate_indicator(1_000_000, 0.005, np.random.default_rng(2024))
    lengths = run_lengths(flags)
    mean = float(lengths.mean())
    r60 = interpolation_ratio(60, 0, 90)
    r59 = interpolation_ratio(59, 0, 90)
    ok = abs(mean - 199.0) <= 0.05 * 199.0 and r60 == 1.0 and r59 < 1.0
    report(6, "intervention statistics", ok,
           f"mean run length={mean:.2f} over {len(lengths)} runs, r(60)={r60}, r(59)={r59:.4f}")


def test_ac07_mirror_and_symmetry_loss():
    lay = h1_layout()
    mirror = MirrorMap.for_layout(lay)
    rng = np.random.default_rng(7)
    maps = [joint_map(lay), proprio_map(lay), command_map(), mirror.observation, mirror.action]
    invol = all(m.is_involution() for m in maps)
    x = rng.normal(size=(64, mirror.observation.dim))
    exact = bool(np.array_equal(mirror.observation(mirror.observation(x)), x))
    # equivariant linear policy: W = (M + Fa^T M Fo) / 2 commutes with the mirror
    Fa = np.eye(19)[mirror.action.perm] * mirror.action.sign[:, None]
    Fo = np.eye(mirror.observation.dim)[mirror.observation.perm] * mirror.observation.sign[:, None]
    M = rng.normal(size=(19, mirror.observation.dim))
    W = 0.5 * (M + Fa.T @ M @ Fo)
    sym_good = symmetry_loss(lambda o: o @ W.T, x, mirror)
    sym_bad = symmetry_loss(lambda o: o @ M.T, x, mirror)
    ok = invol and exact and sym_good < 1e-20 and sym_bad > 0.0
    report(7, "mirror involutions and symmetry loss", ok,
           f"involutions={invol}, exact={exact}, equivariant loss={sym_good:.1e}, broken loss={sym_bad:.3g}")


def test_ac08_dimensions_and_gradient_check():
    lay = h1_layout()
    step = RobotStep.zeros(q=lay.nominal_array, phi_bar=np.array([0.25, 0.75]))
    frame = ob.assemble_observation(step, CommandVector(), layout=lay)
    dims = (len(frame.o_pro), len(frame.o_pri), len(frame.o_ter), len(frame.commands), ob.ACT_DIM)
    dims_ok = dims == (63, 24, 221, 12, 19) and len(frame.policy_vector()) == ob.POLICY_OBS_DIM \
        and len(frame.critic_vector()) == ob.CRITIC_OBS_DIM

    spec = NetSpec().scaled(8)
    rng = np.random.default_rng(8)
    params = init_params(spec, rng, out_scale=0.5)
    B = 4
    pol = rng.normal(size=(B, spec.policy_obs_dim))
    mu0 = micro_net_forward_backward(spec, Batch(pol, rng.normal(size=(B, spec.critic_obs_dim)),
                                                 np.zeros((B, 19)), np.zeros(B), np.zeros(B), np.zeros(B),
                                                 np.zeros((B, 6))), params)[0]["actions"]
    batch = Batch(pol, rng.normal(size=(B, spec.critic_obs_dim)), mu0 + 0.3 * rng.normal(size=(B, 19)),
                  np.full(B, -20.0), rng.normal(size=B), rng.normal(size=B), rng.normal(size=(B, 6)))
    mirror = MirrorMap.for_layout(lay)
    config = LossConfig(clip=1e6)  # keep the surrogate smooth for the difference quotient
    out, grads = micro_net_forward_backward(spec, batch, params, config, mirror)
    h = 1e-5
    worst = 0.0
    for key, p in params.items():
        flat = p.reshape(-1)
        g = grads[key].reshape(-1)
        for i in range(flat.size):
            old = flat[i]
            flat[i] = old + h
            lp = loss_and_grad(params, spec, batch, config, mirror, need_grad=False)[0].total
            flat[i] = old - h
            lm = loss_and_grad(params, spec, batch, config, mirror, need_grad=False)[0].total
            flat[i] = old
            fd = (lp - lm) / (2 * h)
            worst = max(worst, abs(fd - g[i]) / max(abs(fd) + abs(g[i]), 1e-8))
    n_params = sum(p.size for p in params.values())
    report(8, "dimension ledger and gradient check", dims_ok and worst < 1e-4 and out["actions"].shape == (B, 19),
           f"dims={dims}, {n_params} params, max rel err={worst:.2e}")


def test_ac09_oracle_rollout_tracking():
    cmd = CommandVector(vx=1.0, h=-0.1, p=0.2, w=0.3)
    log = run_oracle_rollout(OracleConfig(walking(), cmd, steps=1000, lag=0.0, seed=9))
    rep = tracking_error(log.steps, log.commands)
    e0 = max(rep.errors[k] for k in ("h", "p", "w"))
    swing = max(abs(compute_rewards(s, c)["foot_swing_tracking"].contribution)
                for s, c in zip(log.steps, log.commands))
    cmd_h = CommandVector(h=-0.1)
    lagged = run_oracle_rollout(OracleConfig(walking(), cmd_h, steps=1000, lag=0.1, seed=9))
    e_h = tracking_error(lagged.steps, lagged.commands).errors["h"]
    closed = expected_lag_error(-0.1, 0.1, 0.02, 1000)
    ok = e0 < 1e-6 and swing == 0.0 and abs(e_h - closed) < 1e-6
    report(9, "oracle rollout tracking", ok,
           f"lag=0 max E(h,p,w)={e0:.1e}, max swing penalty={swing}, "
           f"lag=0.1 E_h={e_h:.12f} vs closed form {closed:.12f}")


def test_ac10_toy_ppo():
    t0 = time.perf_counter()
    rep = run_toy_ppo(ToyConfig(beta=0.5), seed=0)
    rep0 = run_toy_ppo(ToyConfig(beta=0.0), seed=0)
    dt = time.perf_counter() - t0
    ok = rep.final_error < 0.05 and rep0.final_error < 0.05 and rep.final_sym_loss < 0.01 \
        and 0.3 < rep.random_error and dt < 600.0
    report(10, "toy PPO convergence", ok,
           f"beta=0.5 final={rep.final_error:.4f} sym={rep.final_sym_loss:.2e}, "
           f"beta=0 final={rep0.final_error:.4f}, random baseline={rep.random_error:.3f}, "
           f"initial={rep.initial_error:.3f}, {dt:.1f}s for both runs")


def test_ac11_noise_curriculum():
    a, n = 0.0, 0
    while a < 1.0:
        a = update_noise_alpha(a, 1.9, 1.9)
        n += 1
        if n > 1000:
            break
    peak = a
    b, falls = 1.0, 0
    while b > 0.0 and falls < 1000:
        b = update_noise_alpha(b, 0.5, 1.9)
        falls += 1
    ok = n == 100 and peak == 1.0 and update_noise_alpha(1.0, 1.9, 1.9) == 1.0 and falls == 100 and b == 0.0
    report(11, "noise curriculum", ok, f"rise steps={n}, alpha={peak}, decay steps to 0={falls}")


def _cli_outputs(tmp: Path, tag: str) -> dict:
    d = tmp / tag
    d.mkdir()
    data = d / "traj.jsonl"
    data.write_text("".join(f'{{"t": {i / 30:.12f}, "joints": [{math.sin(i / 5):.6f}, {i * 0.01:.3f}]}}\n'
                            for i in range(31)))
    cmds = [
        ["clock", "--gait", "walking", "--cycles", "3", "--out", str(d / "clock.csv")],
        ["traj", "--l", "0.2", "--n", "201", "--out", str(d / "traj.csv"), "--svg", str(d / "traj.svg")],
        ["sample-commands", "--gait", "walking", "--n", "200", "--seed", "7", "--out", str(d / "cmds.jsonl")],
        ["rollout", "--vx", "1.0", "--steps", "300", "--lag", "0.1", "--p-flip", "0.02", "--alpha", "0.5",
         "--seed", "1", "--out", str(d / "log.jsonl")],
        ["metrics", "--log", str(d / "log.jsonl"), "--out", str(d / "report.json")],
        ["reward", "--log", str(d / "log.jsonl"), "--out", str(d / "breakdown.csv")],
        ["intervene", "--steps", "100000", "--p", "0.005", "--seed", "3", "--out", str(d / "runs.csv")],
        ["intervene", "--dataset", str(data), "--out", str(d / "dataset.csv")],
        ["train-toy", "--epochs", "2", "--seed", "1", "--out", str(d / "toy.json")],
        ["export", "--log", str(d / "log.jsonl"), "--out-dir", str(d / "curves"), "--svg"],
    ]
    for argv in cmds:
        assert cli.main(argv) == 0, argv
    return {p.relative_to(d).as_posix(): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()}


def test_ac12_cli_determinism(tmp_path):
    a = _cli_outputs(tmp_path, "a")
    b = _cli_outputs(tmp_path, "b")
    same = sorted(k for k in a if a[k] == b.get(k))
    diff = sorted(set(a) ^ set(b)) + sorted(k for k in a if k in b and a[k] != b[k])
    report(12, "CLI determinism", not diff and len(a) >= 14,
           f"{len(same)} files byte-identical, differing={diff}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-s", "-q"]))
