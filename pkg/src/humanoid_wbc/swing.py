"""Swing-foot target trajectories.

The z target is a piecewise quintic over the homogenized phase: zero during
stance, a rise from the start height to the apex on [0.5, 0.75] and a fall
from the apex to the end height on [0.75, 1.0], with zero velocity and
acceleration at every knot.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RISE = (0.5, 0.75)
FALL = (0.75, 1.0)


@dataclass(frozen=True)
class SwingProfile:
    l: float
    p_start_z: float = 0.0
    p_end_z: float = 0.0
    phi_stance: float = 0.5

    def __post_init__(self):
        if not np.isfinite([self.l, self.p_start_z, self.p_end_z]).all():
            raise ValueError("swing profile heights must be finite")
        if self.l < 0.0:
            raise ValueError(f"swing height must be non-negative, got {self.l}")


@dataclass(frozen=True)
class QuinticSegment:
    """Polynomial a5*x^5 + ... + a0 on the closed interval ``domain``."""

    coefficients: tuple[float, ...]
    domain: tuple[float, float]

    def __call__(self, x, order: int = 0):
        c = np.asarray(self.coefficients)
        for _ in range(order):
            c = np.polyder(c)
        return np.polyval(c, x)


def _smoothstep(s):
    return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)


def _smoothstep_d1(s):
    return 30.0 * s * s * (1.0 - s) ** 2


def _smoothstep_d2(s):
    return 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s)


def _check_phase(phi_bar) -> np.ndarray:
    pb = np.asarray(phi_bar, dtype=float)
    # NaN fails both comparisons, so this also rejects non-finite input
    if pb.size and not (pb.min() >= 0.0 and pb.max() <= 1.0):
        raise ValueError("homogenized phase must lie in [0, 1]")
    return pb


def _segments(pb: np.ndarray, profile: SwingProfile):
    """Return (start, end, s, width) arrays describing the active quintic."""
    rise = pb <= RISE[1]
    start = np.where(rise, profile.p_start_z, profile.l)
    end = np.where(rise, profile.l, profile.p_end_z)
    t0 = np.where(rise, RISE[0], FALL[0])
    width = 0.25
    s = np.clip((pb - t0) / width, 0.0, 1.0)
    return start, end, s, width


def target_height(phi_bar, profile: SwingProfile):
    pb = _check_phase(phi_bar)
    start, end, s, _ = _segments(pb, profile)
    z = np.where(pb < 0.5, 0.0, start + (end - start) * _smoothstep(s))
    return float(z) if z.ndim == 0 else z


def target_derivatives(phi_bar, profile: SwingProfile):
    """d/dphi_bar and d2/dphi_bar2 of ``target_height``."""
    pb = _check_phase(phi_bar)
    start, end, s, w = _segments(pb, profile)
    stance = pb < 0.5
    vel = np.where(stance, 0.0, (end - start) * _smoothstep_d1(s) / w)
    acc = np.where(stance, 0.0, (end - start) * _smoothstep_d2(s) / w**2)
    if vel.ndim == 0:
        return float(vel), float(acc)
    return vel, acc


def _boundary_system(t0: float, t1: float) -> np.ndarray:
    rows = []
    for t in (t0, t1):
        rows.append([t**5, t**4, t**3, t**2, t, 1.0])
    for t in (t0, t1):
        rows.append([5 * t**4, 4 * t**3, 3 * t**2, 2 * t, 1.0, 0.0])
    for t in (t0, t1):
        rows.append([20 * t**3, 12 * t**2, 6 * t, 2.0, 0.0, 0.0])
    return np.array(rows)


def solve_quintic_segment(t0: float, t1: float, z0: float, z1: float) -> QuinticSegment:
    """Dense 6x6 solve for a quintic with given end positions and zero end
    velocity/acceleration."""
    if not t1 > t0:
        raise ValueError(f"degenerate segment [{t0}, {t1}]")
    A = _boundary_system(t0, t1)
    rhs = np.array([z0, z1, 0.0, 0.0, 0.0, 0.0])
    try:
        coef = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"singular boundary system on [{t0}, {t1}]") from exc
    return QuinticSegment(tuple(float(c) for c in coef), (t0, t1))


def solve_quintic_oracle(profile: SwingProfile) -> tuple[QuinticSegment, QuinticSegment]:
    rise = solve_quintic_segment(*RISE, profile.p_start_z, profile.l)
    fall = solve_quintic_segment(*FALL, profile.l, profile.p_end_z)
    return rise, fall


def evaluate_oracle(phi_bar, segments: tuple[QuinticSegment, QuinticSegment]):
    pb = np.asarray(phi_bar, dtype=float)
    rise, fall = segments
    z = np.where(pb < 0.5, 0.0, np.where(pb <= RISE[1], rise(pb), fall(pb)))
    return float(z) if z.ndim == 0 else z


def stride_length(velocity, frequency: float, phi_stance: float = 0.5):
    """Linear stride heuristic: body travel during one stance period.

    A placement heuristic used only by the oracle rollout.
    """
    return np.asarray(velocity, dtype=float) * (phi_stance / frequency)


def stride_offset(phi_bar: float, velocity, frequency: float, phi_stance: float = 0.5):
    """Foot offset from its hip (base frame) along the stride direction.

    Moves from +stride/2 to -stride/2 over stance and back over swing.
    """
    stride = stride_length(velocity, frequency, phi_stance)
    pb = float(_check_phase(phi_bar))
    if pb < 0.5:
        frac = pb / 0.5
        return stride * (0.5 - frac)
    frac = (pb - 0.5) / 0.5
    return stride * (frac - 0.5)


def trajectory_table(profile: SwingProfile, n: int = 101) -> list[dict]:
    grid = np.linspace(0.0, 1.0, n)
    z = target_height(grid, profile)
    vel, acc = target_derivatives(grid, profile)
    return [
        {"phibar": float(p), "height": float(a), "velocity": float(b), "acceleration": float(c)}
        for p, a, b, c in zip(grid, z, vel, acc)
    ]
