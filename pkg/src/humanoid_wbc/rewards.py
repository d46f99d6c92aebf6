"""Reward terms, weights, the intervention reward mask and episode metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Sequence

import numpy as np

from .commands import CommandVector
from .gait import ContactModelParams, contact_probability
from .layout import JointLayout, h1_layout
from .robot_step import RobotStep
from .swing import SwingProfile, target_height

TASK = "task"
BEHAVIOR = "behavior"
REGULARIZATION = "regularization"

# term name -> group, in table order
TERMS = {
    "lin_vel_tracking": TASK,
    "ang_vel_tracking": TASK,
    "body_height_tracking": BEHAVIOR,
    "body_pitch_tracking": BEHAVIOR,
    "waist_yaw_tracking": BEHAVIOR,
    "foot_swing_tracking": BEHAVIOR,
    "contact_swing_tracking": BEHAVIOR,
    "rp_ang_vel": REGULARIZATION,
    "vertical_body_movement": REGULARIZATION,
    "feet_slip": REGULARIZATION,
    "action_rate": REGULARIZATION,
    "action_smoothness": REGULARIZATION,
    "joint_torque": REGULARIZATION,
    "joint_acceleration": REGULARIZATION,
    "upper_joint_deviation": REGULARIZATION,
    "hip_joint_deviation": REGULARIZATION,
    "feet_symmetry": REGULARIZATION,
    "termination": REGULARIZATION,
}

# regularizers that only concern the upper body; masked under intervention
UPPER_BODY_TERMS = ("upper_joint_deviation",)

EXP_CLAMP = 20.0
FEET_SYMMETRY_TOL = 1e-9


@dataclass(frozen=True)
class RewardWeights:
    lin_vel_tracking: float = 2.0
    ang_vel_tracking: float = 2.0
    body_height_tracking: float = -40.0
    body_pitch_tracking: float = -10.0
    waist_yaw_tracking: float = -2.0
    foot_swing_tracking: float = -30.0
    contact_swing_tracking: float = -2.0
    rp_ang_vel: float = -0.5
    vertical_body_movement: float = -0.1
    feet_slip: float = -0.2
    action_rate: float = -0.01
    action_smoothness: float = -0.01
    joint_torque: float = -5e-6
    joint_acceleration: float = -2.5e-7
    upper_joint_deviation: float = -0.5
    hip_joint_deviation: float = -2.0
    feet_symmetry: float = -5.0
    termination: float = -200.0


@dataclass(frozen=True)
class RewardConfig:
    weights: RewardWeights = field(default_factory=RewardWeights)
    contact: ContactModelParams = field(default_factory=ContactModelParams)
    sigma_cf: float = 50.0
    sigma_cv: float = 5.0
    # "as_printed": exp(+x / sigma) clamped; "negated_exponent": exp(-x / sigma)
    contact_reward_form: str = "as_printed"
    p_start_z: float = 0.0
    p_end_z: float = 0.0

    def __post_init__(self):
        if self.contact_reward_form not in ("as_printed", "negated_exponent"):
            raise ValueError(f"unknown contact reward form {self.contact_reward_form!r}")


@dataclass(frozen=True)
class TermValue:
    raw: float
    weighted: float
    group: str
    masked: bool = False

    @property
    def contribution(self) -> float:
        return 0.0 if self.masked else self.weighted


@dataclass(frozen=True)
class RewardBreakdown:
    terms: dict

    @property
    def total(self) -> float:
        return math.fsum(t.contribution for t in self.terms.values())

    def group_total(self, group: str) -> float:
        return math.fsum(t.contribution for t in self.terms.values() if t.group == group)

    def groups(self) -> dict:
        return {g: self.group_total(g) for g in (TASK, BEHAVIOR, REGULARIZATION)}

    def __getitem__(self, name: str) -> TermValue:
        return self.terms[name]


def _sq(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.dot(x.ravel(), x.ravel()))


def reward_velocity_tracking(step: RobotStep, cmd: CommandVector,
                             weights: RewardWeights = RewardWeights()) -> tuple[float, float]:
    lin = math.exp(-_sq([cmd.vx - step.base_lin_vel[0], cmd.vy - step.base_lin_vel[1]]) / 0.2)
    ang = math.exp(-((cmd.omega - step.base_ang_vel[2]) ** 2) / 0.2)
    return weights.lin_vel_tracking * lin, weights.ang_vel_tracking * ang


def reward_posture(step: RobotStep, cmd: CommandVector,
                   weights: RewardWeights = RewardWeights()) -> tuple[float, float, float]:
    return (
        weights.body_height_tracking * (cmd.h - step.body_height) ** 2,
        weights.body_pitch_tracking * (cmd.p - step.body_pitch) ** 2,
        weights.waist_yaw_tracking * (cmd.w - step.waist_yaw) ** 2,
    )


def swing_targets(step: RobotStep, cmd: CommandVector, config: RewardConfig = RewardConfig()) -> np.ndarray:
    profile = SwingProfile(cmd.l, config.p_start_z, config.p_end_z, cmd.phi_stance)
    return np.array([target_height(pb, profile) for pb in step.phi_bar])


def contact_probs_of(step: RobotStep, params: ContactModelParams = ContactModelParams()) -> np.ndarray:
    return np.asarray(contact_probability(step.phi_bar, params), dtype=float)


def foot_swing_raw(step: RobotStep, targets, contact_probs) -> float:
    err = np.asarray(targets) - step.swing_height
    return float(np.sum((1.0 - np.asarray(contact_probs)) * err**2))


def reward_foot_swing(step: RobotStep, cmd: CommandVector, contact_probs,
                      config: RewardConfig = RewardConfig()) -> float:
    targets = swing_targets(step, cmd, config)
    return config.weights.foot_swing_tracking * foot_swing_raw(step, targets, contact_probs)


def contact_swing_raw(step: RobotStep, contact_probs, sigma_cf: float = 50.0, sigma_cv: float = 5.0,
                      form: str = "as_printed") -> float:
    c = np.asarray(contact_probs, dtype=float)
    force_sq = np.sum(step.foot_force**2, axis=1)
    vel_sq = np.sum(step.foot_vel[:, :2] ** 2, axis=1)
    if form == "as_printed":
        ef = np.exp(np.minimum(force_sq / sigma_cf, EXP_CLAMP))
        ev = np.exp(np.minimum(vel_sq / sigma_cv, EXP_CLAMP))
        return float(-np.sum((1.0 - c) * (1.0 - ef)) - np.sum(c * (1.0 - ev)))
    if form == "negated_exponent":
        # penalty magnitude, >= 0, so the negative weight penalizes violations
        ef = np.exp(-force_sq / sigma_cf)
        ev = np.exp(-vel_sq / sigma_cv)
        return float(np.sum((1.0 - c) * (1.0 - ef)) + np.sum(c * (1.0 - ev)))
    raise ValueError(f"unknown contact reward form {form!r}")


def reward_contact_swing(step: RobotStep, contact_probs, sigma_cf: float = 50.0, sigma_cv: float = 5.0,
                         weights: RewardWeights = RewardWeights(), form: str = "as_printed") -> float:
    return weights.contact_swing_tracking * contact_swing_raw(step, contact_probs, sigma_cf, sigma_cv, form)


def regularization_raw(step: RobotStep, layout: JointLayout) -> dict:
    nominal = layout.nominal_array
    upper = layout.upper_body
    hip = layout.hip_xz
    feet_xz = step.foot_pos[:, [0, 2]]
    same_phase = abs(step.phi_bar[0] - step.phi_bar[1]) < FEET_SYMMETRY_TOL
    return {
        "rp_ang_vel": _sq(step.base_ang_vel[:2]),
        "vertical_body_movement": float(step.base_lin_vel[2] ** 2),
        "feet_slip": 1.0 - float(np.sum(np.exp(-np.sum(step.foot_vel[:, :2] ** 2, axis=1)))),
        "action_rate": _sq(step.action - step.last_action),
        "action_smoothness": _sq(step.last_last_action - 2.0 * step.last_action + step.action),
        "joint_torque": _sq(step.tau),
        "joint_acceleration": _sq(step.ddq),
        "upper_joint_deviation": _sq(step.q[upper] - nominal[upper]),
        "hip_joint_deviation": _sq(step.q[hip] - nominal[hip]),
        "feet_symmetry": _sq(feet_xz[0] - feet_xz[1]) if same_phase else 0.0,
        "termination": 1.0 if step.terminated else 0.0,
    }


def reward_regularization(step: RobotStep, layout: JointLayout | None = None,
                          weights: RewardWeights = RewardWeights()) -> dict:
    raw = regularization_raw(step, layout or h1_layout())
    return {k: TermValue(v, getattr(weights, k) * v, REGULARIZATION) for k, v in raw.items()}


def compute_rewards(step: RobotStep, cmd: CommandVector, config: RewardConfig = RewardConfig(),
                    layout: JointLayout | None = None, contact_probs=None) -> RewardBreakdown:
    """Every reward term for one step, then the intervention mask."""
    w = config.weights
    layout = layout or h1_layout()
    c = contact_probs_of(step, config.contact) if contact_probs is None else np.asarray(contact_probs)
    raw = {
        "lin_vel_tracking": math.exp(-_sq([cmd.vx - step.base_lin_vel[0], cmd.vy - step.base_lin_vel[1]]) / 0.2),
        "ang_vel_tracking": math.exp(-((cmd.omega - step.base_ang_vel[2]) ** 2) / 0.2),
        "body_height_tracking": (cmd.h - step.body_height) ** 2,
        "body_pitch_tracking": (cmd.p - step.body_pitch) ** 2,
        "waist_yaw_tracking": (cmd.w - step.waist_yaw) ** 2,
        "foot_swing_tracking": foot_swing_raw(step, swing_targets(step, cmd, config), c),
        "contact_swing_tracking": contact_swing_raw(step, c, config.sigma_cf, config.sigma_cv,
                                                    config.contact_reward_form),
    }
    raw.update(regularization_raw(step, layout))
    terms = {name: TermValue(float(raw[name]), getattr(w, name) * float(raw[name]), group)
             for name, group in TERMS.items()}
    return apply_intervention_mask(RewardBreakdown(terms), step.intervention)


def apply_intervention_mask(breakdown: RewardBreakdown, intervention: bool) -> RewardBreakdown:
    if not intervention:
        return breakdown
    terms = dict(breakdown.terms)
    for name in UPPER_BODY_TERMS:
        terms[name] = replace(terms[name], masked=True)
    return RewardBreakdown(terms)


# ----------------------------------------------------------------------------
# episode metrics

MOVEMENT_POSTURE = ("vx", "vy", "omega", "h", "p", "w")


@dataclass(frozen=True)
class TrackingErrorReport:
    errors: dict
    foot_displacement: float
    n_steps: int
    n_cycles: int

    def to_dict(self) -> dict:
        return {
            "E_cmd": dict(self.errors),
            "D_cmd": self.foot_displacement,
            "n_steps": self.n_steps,
            "n_cycles": self.n_cycles,
        }


def _step_error(step: RobotStep, cmd: CommandVector) -> dict:
    return {
        "vx": abs(cmd.vx - step.base_lin_vel[0]),
        "vy": abs(cmd.vy - step.base_lin_vel[1]),
        "omega": abs(cmd.omega - step.base_ang_vel[2]),
        "h": abs(cmd.h - step.body_height),
        "p": abs(cmd.p - step.body_pitch),
        "w": abs(cmd.w - step.waist_yaw),
    }


def _wrap_time(prev: RobotStep, cur: RobotStep) -> float:
    # linear in raw phase: locate the instant phi_left passed 1.0
    span = cur.phase[0] + 1.0 - prev.phase[0]
    frac = (1.0 - prev.phase[0]) / span if span > 0 else 1.0
    return prev.t + frac * (cur.t - prev.t)


def tracking_error(log: Sequence[RobotStep], cmds: Sequence[CommandVector]) -> TrackingErrorReport:
    """Episode-mean L1 command errors and total foot travel.

    Movement and posture errors are per-step means. Frequency and swing-height
    errors are averaged over completed gait cycles of the left phase clock;
    they are ``None`` when no cycle completes.
    """
    if len(log) == 0:
        raise ValueError("tracking error needs a non-empty log")
    if len(cmds) != len(log):
        raise ValueError("one command per step is required")
    sums = dict.fromkeys(MOVEMENT_POSTURE, 0.0)
    for step, cmd in zip(log, cmds):
        for k, v in _step_error(step, cmd).items():
            sums[k] += v
    errors = {k: v / len(log) for k, v in sums.items()}

    wraps = [i for i in range(1, len(log)) if log[i].phi_bar[0] < log[i - 1].phi_bar[0]]
    f_err, l_err = [], []
    for a, b in zip(wraps, wraps[1:]):
        period = _wrap_time(log[b - 1], log[b]) - _wrap_time(log[a - 1], log[a])
        cmd = cmds[b - 1]
        f_err.append(abs(cmd.f - 1.0 / period))
        apex = np.max(np.stack([s.swing_height for s in log[a:b]]), axis=0)
        l_err.append(float(np.mean(np.abs(cmd.l - apex))))
    errors["f"] = float(np.mean(f_err)) if f_err else None
    errors["l"] = float(np.mean(l_err)) if l_err else None

    disp = 0.0
    for prev, cur in zip(log, log[1:]):
        disp += float(np.sum(np.linalg.norm(cur.foot_pos[:, :2] - prev.foot_pos[:, :2], axis=1)))
    return TrackingErrorReport(errors, disp, len(log), len(f_err))


def term_names() -> tuple[str, ...]:
    return tuple(f.name for f in fields(RewardWeights))
