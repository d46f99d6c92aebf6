"""Per-leg phase clock, homogenized phase, clock signals and the expected
contact probability.

Leg index 0 is the left foot, index 1 the right foot.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import erfc

DEFAULT_SIGMA = 0.02
DEFAULT_DT = 0.02  # 50 Hz control
DEFAULT_PHI_STANCE = 0.5


class GaitKind(str, enum.Enum):
    WALKING = "walking"
    JUMPING = "jumping"
    STANDING = "standing"
    HOPPING = "hopping"


class Leg(enum.IntEnum):
    LEFT = 0
    RIGHT = 1


@dataclass(frozen=True)
class GaitPreset:
    kind: GaitKind
    phase_offset: float = 0.0
    duty_cycle: float = DEFAULT_PHI_STANCE
    fixed_phases: tuple[float, float] | None = None
    flying_leg: Leg = Leg.RIGHT

    def __post_init__(self):
        if not 0.0 <= self.phase_offset < 1.0:
            raise ValueError(f"phase offset must lie in [0, 1), got {self.phase_offset}")
        if not 0.0 < self.duty_cycle < 1.0:
            raise ValueError(f"duty cycle must lie in (0, 1), got {self.duty_cycle}")

    @property
    def advancing(self) -> bool:
        return self.kind in (GaitKind.WALKING, GaitKind.JUMPING)

    def initial_phases(self) -> tuple[float, float]:
        if self.kind is GaitKind.STANDING:
            return self.fixed_phases or (0.25, 0.25)
        if self.kind is GaitKind.HOPPING:
            if self.flying_leg is Leg.RIGHT:
                return (0.0, 0.75)
            return (0.75, 0.0)
        return (0.0, self.phase_offset)


def walking() -> GaitPreset:
    return GaitPreset(GaitKind.WALKING, phase_offset=0.5)


def jumping() -> GaitPreset:
    return GaitPreset(GaitKind.JUMPING, phase_offset=0.0)


def standing() -> GaitPreset:
    return GaitPreset(GaitKind.STANDING, fixed_phases=(0.25, 0.25))


def hopping(flying_leg: Leg = Leg.RIGHT) -> GaitPreset:
    return GaitPreset(GaitKind.HOPPING, flying_leg=Leg(flying_leg))


PRESETS = {
    GaitKind.WALKING: walking,
    GaitKind.JUMPING: jumping,
    GaitKind.STANDING: standing,
    GaitKind.HOPPING: hopping,
}


def preset(name: str | GaitKind, flying_leg: Leg = Leg.RIGHT) -> GaitPreset:
    kind = GaitKind(name)
    if kind is GaitKind.HOPPING:
        return hopping(flying_leg)
    return PRESETS[kind]()


@dataclass(frozen=True)
class ContactModelParams:
    sigma: float = DEFAULT_SIGMA

    def __post_init__(self):
        if not (0.0 < self.sigma <= 0.1):
            raise ValueError(f"sigma must lie in (0, 0.1], got {self.sigma}")


@dataclass(frozen=True)
class PhaseState:
    phi: tuple[float, float]
    frequency: float
    dt: float = DEFAULT_DT
    preset: GaitPreset = field(default_factory=walking)

    def __post_init__(self):
        if len(self.phi) != 2:
            raise ValueError("exactly two phase variables are supported")
        for p in self.phi:
            if not 0.0 <= p < 1.0:
                raise ValueError(f"phase must lie in [0, 1), got {p}")
        if not math.isfinite(self.frequency) or self.frequency <= 0.0:
            raise ValueError(f"gait frequency must be finite and positive, got {self.frequency}")
        if not math.isfinite(self.dt) or self.dt <= 0.0:
            raise ValueError(f"dt must be finite and positive, got {self.dt}")

    @classmethod
    def start(cls, gait: GaitPreset, frequency: float, dt: float = DEFAULT_DT) -> "PhaseState":
        return cls(gait.initial_phases(), frequency, dt, gait)

    @property
    def phi_bar(self) -> tuple[float, float]:
        d = self.preset.duty_cycle
        return (homogenize_phase(self.phi[0], d), homogenize_phase(self.phi[1], d))


def _wrap(x: float) -> float:
    y = x % 1.0
    # x % 1.0 rounds up to 1.0 for tiny negative x
    return 0.0 if y >= 1.0 else y


def advance_phase(state: PhaseState) -> PhaseState:
    """One control step of the phase clock."""
    gait = state.preset
    step = state.frequency * state.dt
    if gait.kind is GaitKind.STANDING:
        return state
    if gait.kind is GaitKind.HOPPING:
        phi = list(state.phi)
        stepping = 1 - int(gait.flying_leg)
        phi[stepping] = _wrap(phi[stepping] + step)
        phi[int(gait.flying_leg)] = 0.75
        return replace(state, phi=(phi[0], phi[1]))
    left = _wrap(state.phi[0] + step)
    right = _wrap(left + gait.phase_offset)
    return replace(state, phi=(left, right))


_BELOW_ONE = float(np.nextafter(1.0, 0.0))


def homogenize_phase(phi, phi_stance: float = DEFAULT_PHI_STANCE):
    """Map stance onto [0, 0.5) and swing onto [0.5, 1).

    Works on scalars and numpy arrays.
    """
    if not 0.0 < phi_stance < 1.0:
        raise ValueError(f"phi_stance must lie strictly inside (0, 1), got {phi_stance}")
    if isinstance(phi, float):
        if not 0.0 <= phi < 1.0:
            raise ValueError("phase must lie in [0, 1)")
        if phi < phi_stance:
            return 0.5 * phi / phi_stance
        return min(0.5 + 0.5 * (phi - phi_stance) / (1.0 - phi_stance), _BELOW_ONE)
    arr = np.asarray(phi, dtype=float)
    if arr.size and not (arr.min() >= 0.0 and arr.max() < 1.0):
        raise ValueError("phase must lie in [0, 1)")
    out = np.where(
        arr < phi_stance,
        0.5 * arr / phi_stance,
        0.5 + 0.5 * (arr - phi_stance) / (1.0 - phi_stance),
    )
    # rounding can lift phases just below 1 onto 1.0
    out = np.minimum(out, _BELOW_ONE)
    return float(out) if out.ndim == 0 else out


def normal_cdf(x):
    return 0.5 * erfc(-np.asarray(x, dtype=float) / math.sqrt(2.0))


def contact_probability(phi_bar, params: ContactModelParams = ContactModelParams()):
    """Smoothed stance indicator: ~1 on [0, 0.5), ~0 on [0.5, 1)."""
    pb = np.asarray(phi_bar, dtype=float)
    if np.any(pb < 0.0) or np.any(pb > 1.0):
        raise ValueError("homogenized phase must lie in [0, 1]")
    s = params.sigma
    c = normal_cdf(pb / s) * (1.0 - normal_cdf((pb - 0.5) / s)) + normal_cdf((pb - 1.0) / s) * (
        1.0 - normal_cdf((pb - 1.5) / s)
    )
    return float(c) if c.ndim == 0 else c


def clock_values(state: PhaseState) -> tuple[float, float]:
    pb = state.phi_bar
    return (math.sin(2.0 * math.pi * pb[0]), math.sin(2.0 * math.pi * pb[1]))


def clock_trace(gait: GaitPreset, frequency: float, cycles: float, dt: float = DEFAULT_DT,
                params: ContactModelParams = ContactModelParams()) -> list[dict]:
    """Sampled phase/clock/contact rows, one per control step, starting at t=0."""
    n = int(round(cycles / (frequency * dt)))
    state = PhaseState.start(gait, frequency, dt)
    rows = []
    for k in range(n + 1):
        pb = state.phi_bar
        cl = clock_values(state)
        rows.append({
            "t": k * dt,
            "phi1": state.phi[0],
            "phi2": state.phi[1],
            "phibar1": pb[0],
            "phibar2": pb[1],
            "clockL": cl[0],
            "clockR": cl[1],
            "C1": contact_probability(pb[0], params),
            "C2": contact_probability(pb[1], params),
        })
        state = advance_phase(state)
    return rows
