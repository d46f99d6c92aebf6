"""Actor and critic observation assembly with fixed dimensions."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..commands import CommandVector
from ..layout import JointLayout, h1_layout
from ..robot_step import RobotStep

PRO_DIM = 63
PRI_DIM = 24
TER_DIM = 221
CMD_DIM = 12
ACT_DIM = 19
HISTORY = 5
EST_DIM = 6  # linear velocity 3, foot clearance 2, body height 1
TERRAIN_GRID = (13, 17)
N_COLLISION_LINKS = 11  # trunk, hip x2, thigh x2, shank x2, shoulder x2, arm x2

POLICY_OBS_DIM = HISTORY * PRO_DIM + CMD_DIM + 1
CRITIC_OBS_DIM = PRO_DIM + PRI_DIM + TER_DIM + CMD_DIM + 1


def _check(name: str, x: np.ndarray, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (dim,):
        raise ValueError(f"{name} must have {dim} entries, got shape {x.shape}")
    return x


def rotation_matrix(rpy) -> np.ndarray:
    """World-from-base rotation, Z-Y-X (yaw, pitch, roll) convention."""
    r, p, y = rpy
    cr, sr, cp, sp, cy, sy = math.cos(r), math.sin(r), math.cos(p), math.sin(p), math.cos(y), math.sin(y)
    rz = np.array([[cy, -sy, 0.0], [sy, cy, 0.0], [0.0, 0.0, 1.0]])
    ry = np.array([[cp, 0.0, sp], [0.0, 1.0, 0.0], [-sp, 0.0, cp]])
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cr, -sr], [0.0, sr, cr]])
    return rz @ ry @ rx


def gravity_projection(rpy) -> np.ndarray:
    """Unit gravity direction expressed in the base frame."""
    return rotation_matrix(rpy).T @ np.array([0.0, 0.0, -1.0])


def proprio_vector(step: RobotStep, layout: JointLayout | None = None) -> np.ndarray:
    layout = layout or h1_layout()
    o = np.concatenate([
        step.base_ang_vel,
        gravity_projection(step.base_rpy),
        step.q - layout.nominal_array,
        step.dq,
        step.last_action,
    ])
    return _check("o_pro", o, PRO_DIM)


def privileged_vector(step: RobotStep, cmd: CommandVector, friction: float = 1.0,
                      collisions=None) -> np.ndarray:
    collisions = np.zeros(N_COLLISION_LINKS) if collisions is None else _check(
        "collisions", collisions, N_COLLISION_LINKS)
    o = np.concatenate([
        step.base_lin_vel,
        [step.body_height - cmd.h],
        step.swing_height,
        [friction],
        step.foot_force.ravel(),
        collisions,
    ])
    return _check("o_pri", o, PRI_DIM)


def terrain_vector(heights=None) -> np.ndarray:
    """Elevation samples on a 13x17 grid around the base; flat ground is zeros."""
    if heights is None:
        return np.zeros(TER_DIM)
    h = np.asarray(heights, dtype=float)
    if h.shape == TERRAIN_GRID:
        h = h.ravel()
    return _check("o_ter", h, TER_DIM)


def estimation_targets(step: RobotStep) -> np.ndarray:
    return np.concatenate([step.base_lin_vel, step.swing_height, [step.body_height]])


@dataclass(frozen=True)
class ObservationFrame:
    o_pro: np.ndarray
    o_pri: np.ndarray
    o_ter: np.ndarray
    history: np.ndarray  # (HISTORY, PRO_DIM), oldest first, newest == o_pro
    commands: np.ndarray
    indicator: float

    def __post_init__(self):
        _check("o_pro", self.o_pro, PRO_DIM)
        _check("o_pri", self.o_pri, PRI_DIM)
        _check("o_ter", self.o_ter, TER_DIM)
        _check("commands", self.commands, CMD_DIM)
        if np.shape(self.history) != (HISTORY, PRO_DIM):
            raise ValueError(f"history must have shape {(HISTORY, PRO_DIM)}")
        if self.indicator not in (0.0, 1.0):
            raise ValueError("indicator must be 0 or 1")

    def policy_vector(self) -> np.ndarray:
        return np.concatenate([self.history.ravel(), self.commands, [self.indicator]])

    def critic_vector(self) -> np.ndarray:
        return np.concatenate([self.o_pro, self.o_pri, self.o_ter, self.commands, [self.indicator]])


def stack_history(previous: Sequence[np.ndarray], current: np.ndarray, k: int = HISTORY) -> np.ndarray:
    """Last ``k`` frames ending at ``current``, zero-padded at the front."""
    frames = [np.asarray(f, dtype=float) for f in list(previous)[-(k - 1):]] if k > 1 else []
    frames.append(np.asarray(current, dtype=float))
    pad = [np.zeros_like(frames[-1])] * (k - len(frames))
    return np.stack(pad + frames)


def assemble_observation(step: RobotStep, cmd: CommandVector, history: Sequence[np.ndarray] = (),
                         indicator: bool | None = None, layout: JointLayout | None = None,
                         friction: float = 1.0, collisions=None, terrain=None) -> ObservationFrame:
    """``history`` holds earlier proprio frames (oldest first), not including
    this step."""
    for h in history:
        _check("history frame", h, PRO_DIM)
    o_pro = proprio_vector(step, layout)
    ind = step.intervention if indicator is None else bool(indicator)
    return ObservationFrame(
        o_pro=o_pro,
        o_pri=privileged_vector(step, cmd, friction, collisions),
        o_ter=terrain_vector(terrain),
        history=stack_history(history, o_pro),
        commands=_check("commands", cmd.as_array(), CMD_DIM),
        indicator=1.0 if ind else 0.0,
    )
