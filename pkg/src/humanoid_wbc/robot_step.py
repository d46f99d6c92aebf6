"""One control-step snapshot of the robot, the unit of logs and rewards."""
from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

N_JOINTS = 19

_SHAPES = {
    "base_pos": (3,),
    "base_rpy": (3,),
    "base_lin_vel": (3,),
    "base_ang_vel": (3,),
    "q": (N_JOINTS,),
    "dq": (N_JOINTS,),
    "ddq": (N_JOINTS,),
    "tau": (N_JOINTS,),
    "foot_pos": (2, 3),
    "foot_vel": (2, 3),
    "foot_force": (2, 3),
    "action": (N_JOINTS,),
    "last_action": (N_JOINTS,),
    "last_last_action": (N_JOINTS,),
    "phase": (2,),
    "phi_bar": (2,),
}


@dataclass
class RobotStep:
    """Base states are in the base frame; feet are in the world frame.

    ``body_height`` is the offset from the nominal standing height, the same
    convention as the height command.
    """

    step: int
    t: float
    base_pos: np.ndarray
    base_rpy: np.ndarray
    base_lin_vel: np.ndarray
    base_ang_vel: np.ndarray
    body_height: float
    body_pitch: float
    waist_yaw: float
    q: np.ndarray
    dq: np.ndarray
    ddq: np.ndarray
    tau: np.ndarray
    foot_pos: np.ndarray
    foot_vel: np.ndarray
    foot_force: np.ndarray
    action: np.ndarray
    last_action: np.ndarray
    last_last_action: np.ndarray
    phase: np.ndarray
    phi_bar: np.ndarray
    intervention: bool = False
    terminated: bool = False

    def __post_init__(self):
        for name, shape in _SHAPES.items():
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
            if not np.isfinite(arr).all():
                raise ValueError(f"{name} must be finite")
            setattr(self, name, arr)
        for name in ("t", "body_height", "body_pitch", "waist_yaw"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise ValueError(f"{name} must be finite")
            setattr(self, name, v)
        if np.any(self.foot_force[:, 2] < 0.0):
            raise ValueError("normal contact force must be non-negative")
        self.step = int(self.step)
        self.intervention = bool(self.intervention)
        self.terminated = bool(self.terminated)

    @property
    def swing_height(self) -> np.ndarray:
        return self.foot_pos[:, 2]

    @classmethod
    def zeros(cls, **overrides) -> "RobotStep":
        kw = {name: np.zeros(shape) for name, shape in _SHAPES.items()}
        kw.update(step=0, t=0.0, body_height=0.0, body_pitch=0.0, waist_yaw=0.0)
        kw.update(overrides)
        return cls(**kw)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = v.tolist() if isinstance(v, np.ndarray) else v
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "RobotStep":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in names})
