"""Upper-body intervention: the on/off indicator process, interpolated
uniform-noise targets, blending with the policy action, and replay of
recorded trajectories."""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

DEFAULT_P_FLIP = 0.005
DEFAULT_T_INTERVAL = 90


@dataclass(frozen=True)
class InterventionState:
    active: bool
    t0: int
    a_init: np.ndarray
    a_target: np.ndarray
    alpha: float = 0.0
    p_flip: float = DEFAULT_P_FLIP
    t_interval: int = DEFAULT_T_INTERVAL

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.t_interval < 1:
            raise ValueError("t_interval must be at least one step")
        if not 0.0 <= self.p_flip <= 1.0:
            raise ValueError(f"p_flip must lie in [0, 1], got {self.p_flip}")

    @classmethod
    def start(cls, a_init, rng: np.random.Generator, low, high, **kw) -> "InterventionState":
        a_init = np.asarray(a_init, dtype=float)
        return cls(False, 0, a_init, sample_noise_target(rng, low, high), **kw)


def step_indicator(state: InterventionState, rng: np.random.Generator) -> InterventionState:
    if rng.random() < state.p_flip:
        return replace(state, active=not state.active)
    return state


def simulate_indicator(steps: int, p_flip: float, rng: np.random.Generator, start: bool = False) -> np.ndarray:
    """Indicator trace of length ``steps``; each step flips with ``p_flip``.

    Same process as repeated ``step_indicator``, vectorised.
    """
    flips = rng.random(steps) < p_flip
    return (np.cumsum(flips) % 2).astype(bool) ^ start


def run_lengths(flags) -> np.ndarray:
    """Lengths of complete constant runs; the truncated first and last runs
    are dropped."""
    flags = np.asarray(flags, dtype=bool)
    change = np.flatnonzero(flags[1:] != flags[:-1]) + 1
    return np.diff(change)


def interpolation_ratio(t: int, t0: int, t_interval: int) -> float:
    if t < t0:
        raise ValueError("t precedes the noise sample time")
    return min(1.0, 1.5 * (t - t0) / t_interval)


def noise_interpolate(state: InterventionState, t: int) -> np.ndarray:
    r = interpolation_ratio(t, state.t0, state.t_interval)
    return (1.0 - r) * state.a_init + r * state.a_target


def sample_noise_target(rng: np.random.Generator, low, high, margin: float = 0.0) -> np.ndarray:
    low = np.asarray(low, dtype=float) + margin
    high = np.asarray(high, dtype=float) - margin
    return rng.uniform(low, high)


def advance_noise(state: InterventionState, t: int, rng: np.random.Generator, low, high,
                  margin: float = 0.0) -> tuple[InterventionState, np.ndarray]:
    """Noise action at step ``t``, resampling the target every ``t_interval``
    steps. The new segment starts from the last emitted action."""
    if t - state.t0 >= state.t_interval:
        last = noise_interpolate(state, t - 1)
        state = replace(state, t0=t, a_init=last, a_target=sample_noise_target(rng, low, high, margin))
    return state, noise_interpolate(state, t)


def blend_with_policy(a_policy, a_noise, alpha: float):
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return alpha * np.asarray(a_noise, dtype=float) + (1.0 - alpha) * np.asarray(a_policy, dtype=float)


@dataclass(frozen=True)
class DatasetTrajectory:
    frames: np.ndarray
    timestamps: np.ndarray  # seconds
    frequency: float  # native frame rate, Hz

    def __post_init__(self):
        frames = np.atleast_2d(np.asarray(self.frames, dtype=float))
        ts = np.asarray(self.timestamps, dtype=float)
        if frames.shape[0] != ts.shape[0] or frames.shape[0] == 0:
            raise ValueError("one timestamp per frame is required")
        if np.any(np.diff(ts) <= 0.0):
            raise ValueError("timestamps must be strictly increasing")
        if self.frequency <= 0.0:
            raise ValueError("frame rate must be positive")
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "timestamps", ts)

    @property
    def ticks(self) -> np.ndarray:
        """Timestamps in native frame ticks."""
        return self.frequency * self.timestamps

    @classmethod
    def uniform(cls, frames, frequency: float) -> "DatasetTrajectory":
        frames = np.atleast_2d(np.asarray(frames, dtype=float))
        return cls(frames, np.arange(len(frames)) / frequency, frequency)

    @classmethod
    def from_jsonl(cls, path: str | Path, frequency: float | None = None) -> "DatasetTrajectory":
        ts, frames = [], []
        for line in Path(path).read_text().splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            ts.append(float(rec["t"]))
            frames.append([float(v) for v in rec["joints"]])
        if frequency is None:
            frequency = 1.0 / float(np.median(np.diff(ts))) if len(ts) > 1 else 1.0
        return cls(np.array(frames), np.array(ts), frequency)


def dataset_interpolate(traj: DatasetTrajectory, t: float) -> np.ndarray:
    """Blend of the two frames bracketing time ``t`` (seconds)."""
    if len(traj.frames) == 1:
        return traj.frames[0].copy()
    ts = traj.timestamps
    if not ts[0] <= t <= ts[-1]:
        raise ValueError(f"t={t} outside trajectory span [{ts[0]}, {ts[-1]}]")
    ticks = traj.ticks
    x = traj.frequency * t
    k = int(np.searchsorted(ticks, x, side="right") - 1)
    k = min(max(k, 0), len(ticks) - 2)
    gamma = (x - ticks[k]) / (ticks[k + 1] - ticks[k])
    return (1.0 - gamma) * traj.frames[k] + gamma * traj.frames[k + 1]
