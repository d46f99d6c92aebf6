"""Scripted "oracle robot" rollouts.

The oracle stands in for both physics and a trained policy: base and posture
states follow the commands through a first-order lag, feet follow the swing
targets exactly in z and a linear stride heuristic in xy, and stance feet
are pinned to the ground. Contact forces split the body weight among the
scheduled stance feet.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .commands import CommandVector
from .gait import (DEFAULT_DT, DEFAULT_SIGMA, GaitKind, GaitPreset, Leg, PhaseState, advance_phase,
                   preset, walking)
from .intervention import InterventionState, advance_noise, blend_with_policy, step_indicator
from .layout import JointLayout, h1_layout
from .robot_step import RobotStep
from .swing import SwingProfile, stride_length, target_height

GRAVITY = 9.81
HIP_OFFSETS = np.array([[0.0, 0.1], [0.0, -0.1]])  # left, right, base frame


@dataclass
class OracleConfig:
    gait: GaitPreset = field(default_factory=walking)
    command: CommandVector = field(default_factory=CommandVector)
    steps: int = 1000
    lag: float = 0.0  # first-order time constant, seconds; 0 tracks exactly
    seed: int = 0
    dt: float = DEFAULT_DT
    sigma: float = DEFAULT_SIGMA
    p_flip: float = 0.0
    alpha: float = 1.0
    t_interval: int = 90
    mass: float = 47.0
    layout: JointLayout | None = None

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError("steps must be non-negative")
        if self.lag < 0.0 or not math.isfinite(self.lag):
            raise ValueError("lag must be a non-negative time constant")

    def header(self) -> dict:
        return {
            "gait": self.gait.kind.value,
            "flying_leg": self.gait.flying_leg.name.lower(),
            "command": self.command.to_dict(),
            "steps": self.steps,
            "lag": self.lag,
            "seed": self.seed,
            "dt": self.dt,
            "sigma": self.sigma,
            "p_flip": self.p_flip,
            "alpha": self.alpha,
            "t_interval": self.t_interval,
            "mass": self.mass,
        }


@dataclass
class RolloutLog:
    steps: list
    commands: list
    header: dict

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def dt(self) -> float:
        return float(self.header.get("dt", DEFAULT_DT))

    @property
    def sigma(self) -> float:
        return float(self.header.get("sigma", DEFAULT_SIGMA))

    def lines(self) -> Iterable[str]:
        yield json.dumps({"header": self.header}, sort_keys=True)
        for s, c in zip(self.steps, self.commands):
            rec = s.to_dict()
            rec["cmd"] = c.to_dict()
            yield json.dumps(rec)

    def write_jsonl(self, path: str | Path) -> None:
        Path(path).write_text("".join(line + "\n" for line in self.lines()))

    @classmethod
    def read_jsonl(cls, path: str | Path) -> "RolloutLog":
        steps, cmds, header = [], [], {}
        for line in Path(path).read_text().splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            if "header" in rec:
                header = rec["header"]
                continue
            cmds.append(CommandVector.from_dict(rec.pop("cmd")))
            steps.append(RobotStep.from_dict(rec))
        for a, b in zip(steps, steps[1:]):
            if b.step != a.step + 1:
                raise ValueError(f"non-contiguous step indices {a.step} -> {b.step}")
        return cls(steps, cmds, header)


def lag_factor(lag: float, dt: float) -> float:
    """Fraction of the previous value kept per step."""
    return 0.0 if lag == 0.0 else math.exp(-dt / lag)


def _rot2(yaw: float) -> np.ndarray:
    c, s = math.cos(yaw), math.sin(yaw)
    return np.array([[c, -s], [s, c]])


def _advancing(gait: GaitPreset, leg: int) -> bool:
    if gait.kind is GaitKind.HOPPING:
        return leg != int(gait.flying_leg)
    return gait.advancing


def run_oracle_rollout(config: OracleConfig) -> RolloutLog:
    layout = config.layout or h1_layout()
    gait, base_cmd, dt = config.gait, config.command.with_gait(config.gait), config.dt
    rho = lag_factor(config.lag, dt)
    nominal = layout.nominal_array
    upper = layout.upper_body
    lo, hi = layout.limits
    noise_lo, noise_hi = lo[upper] - nominal[upper], hi[upper] - nominal[upper]

    ind_seq, noise_seq = np.random.SeedSequence(config.seed).spawn(2)
    ind_rng, noise_rng = np.random.default_rng(ind_seq), np.random.default_rng(noise_seq)
    interv = InterventionState.start(np.zeros(len(upper)), noise_rng, noise_lo, noise_hi,
                                     alpha=config.alpha, p_flip=config.p_flip, t_interval=config.t_interval)

    phase = PhaseState.start(gait, base_cmd.f, dt)
    targets = np.array([base_cmd.vx, base_cmd.vy, base_cmd.omega, base_cmd.h, base_cmd.p, base_cmd.w])
    state = np.zeros(6)  # vx vy omega h p w, starting from rest at defaults
    yaw = 0.0
    base_xy = np.zeros(2)
    foot_xy = base_xy + HIP_OFFSETS.copy()
    swing_s = np.zeros(2)
    q_prev = nominal.copy()
    dq_prev = np.zeros(layout.n_joints)
    actions = [np.zeros(layout.n_joints), np.zeros(layout.n_joints)]  # a_{t-2}, a_{t-1}
    stride = stride_length([base_cmd.vx, base_cmd.vy], base_cmd.f, gait.duty_cycle)
    profile = SwingProfile(base_cmd.l, 0.0, 0.0, gait.duty_cycle)
    swing_time = (1.0 - gait.duty_cycle) / base_cmd.f

    steps, cmds = [], []
    for k in range(config.steps):
        if k > 0:
            phase = advance_phase(phase)
        prev_state = state.copy()
        state = rho * state + (1.0 - rho) * targets
        vx, vy, omega, h, p, w = state
        yaw += omega * dt
        rot = _rot2(yaw)
        base_xy = base_xy + rot @ np.array([vx, vy]) * dt

        phi_bar = np.array(phase.phi_bar)
        prev_foot = foot_xy.copy()
        foot_z = np.array([target_height(pb, profile) for pb in phi_bar])
        stance = phi_bar < 0.5
        for i in range(2):
            if stance[i]:
                swing_s[i] = 0.0
                continue
            if not _advancing(gait, i):
                foot_xy[i] = base_xy + rot @ HIP_OFFSETS[i]
                continue
            s = (phi_bar[i] - 0.5) / 0.5
            s_prev = swing_s[i]
            if s_prev < 1.0 and s > s_prev:
                t_rem = (1.0 - s) * swing_time
                touchdown = base_xy + rot @ (np.array([vx, vy]) * t_rem + HIP_OFFSETS[i] + 0.5 * stride)
                foot_xy[i] = foot_xy[i] + (touchdown - foot_xy[i]) * (s - s_prev) / (1.0 - s_prev)
            swing_s[i] = s
        foot_vel_xy = (foot_xy - prev_foot) / dt

        n_stance = int(stance.sum())
        force = np.zeros((2, 3))
        if n_stance:
            force[stance, 2] = config.mass * GRAVITY / n_stance

        if config.p_flip > 0.0:
            interv = step_indicator(interv, ind_rng)
        interv, a_noise = advance_noise(interv, k, noise_rng, noise_lo, noise_hi)
        a_upper = blend_with_policy(np.zeros(len(upper)), a_noise, interv.alpha) if interv.active else np.zeros(len(upper))

        q = nominal.copy()
        q[layout.waist] = w
        q[upper] = nominal[upper] + a_upper
        dq = (q - q_prev) / dt
        ddq = (dq - dq_prev) / dt
        action = q - nominal

        foot_pos = np.column_stack([foot_xy, foot_z])
        foot_vel = np.column_stack([foot_vel_xy, np.zeros(2)])
        step = RobotStep(
            step=k,
            t=k * dt,
            base_pos=np.array([base_xy[0], base_xy[1], h]),
            base_rpy=np.array([0.0, p, yaw]),
            base_lin_vel=np.array([vx, vy, (h - prev_state[3]) / dt]),
            base_ang_vel=np.array([0.0, (p - prev_state[4]) / dt, omega]),
            body_height=h,
            body_pitch=p,
            waist_yaw=w,
            q=q,
            dq=dq,
            ddq=ddq,
            tau=np.zeros(layout.n_joints),
            foot_pos=foot_pos,
            foot_vel=foot_vel,
            foot_force=force,
            action=action,
            last_action=actions[1],
            last_last_action=actions[0],
            phase=np.array(phase.phi),
            phi_bar=phi_bar,
            intervention=interv.active,
            terminated=False,
        )
        steps.append(step)
        cmds.append(base_cmd.with_clocks(phase))
        actions = [actions[1], action]
        q_prev, dq_prev = q, dq
    return RolloutLog(steps, cmds, config.header())


def config_from_header(header: dict) -> OracleConfig:
    return OracleConfig(
        gait=preset(header["gait"], Leg[header.get("flying_leg", "right").upper()]),
        command=CommandVector.from_dict(header["command"]),
        steps=int(header["steps"]),
        lag=float(header["lag"]),
        seed=int(header["seed"]),
        dt=float(header["dt"]),
        sigma=float(header["sigma"]),
        p_flip=float(header["p_flip"]),
        alpha=float(header["alpha"]),
        t_interval=int(header["t_interval"]),
        mass=float(header["mass"]),
    )


def expected_lag_error(initial_error: float, lag: float, dt: float, steps: int) -> float:
    """Closed-form mean |error| of the lagged state over ``steps`` records,
    starting ``initial_error`` away from the command."""
    rho = lag_factor(lag, dt)
    if rho == 0.0:
        return 0.0
    return abs(initial_error) * rho * (1.0 - rho**steps) / (steps * (1.0 - rho))



