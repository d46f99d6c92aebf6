"""Task and behavior commands: ranges, sampling and the speed / noise
curricula."""
from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .gait import GaitKind, GaitPreset, PhaseState, clock_values

# wire order of the 12-dim command block fed to the policy
COMMAND_CHANNELS = ("vx", "vy", "omega", "f", "l", "h", "p", "w", "psi", "phi_stance", "clock_l", "clock_r")
BEHAVIOR_CHANNELS = COMMAND_CHANNELS[3:]
SAMPLED_CHANNELS = ("vx", "vy", "omega", "f", "l", "h", "p", "w")
HOPPING_CHANNELS = ("vx", "vy", "omega", "h")


@dataclass(frozen=True)
class CommandVector:
    vx: float = 0.0
    vy: float = 0.0
    omega: float = 0.0
    f: float = 2.0
    l: float = 0.15
    h: float = 0.0
    p: float = 0.0
    w: float = 0.0
    psi: float = 0.5
    phi_stance: float = 0.5
    clock_l: float = 0.0
    clock_r: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, c) for c in COMMAND_CHANNELS], dtype=float)

    def extended_behavior(self) -> np.ndarray:
        return self.as_array()[3:]

    @classmethod
    def from_array(cls, values) -> "CommandVector":
        values = np.asarray(values, dtype=float)
        if values.shape != (len(COMMAND_CHANNELS),):
            raise ValueError(f"command vector must have {len(COMMAND_CHANNELS)} entries")
        return cls(**{c: float(v) for c, v in zip(COMMAND_CHANNELS, values)})

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "CommandVector":
        return cls(**{k: float(d[k]) for k in COMMAND_CHANNELS if k in d})

    def with_clocks(self, state: PhaseState) -> "CommandVector":
        cl, cr = clock_values(state)
        return replace(self, clock_l=cl, clock_r=cr)

    def with_gait(self, gait: GaitPreset) -> "CommandVector":
        return replace(self, psi=gait.phase_offset, phi_stance=gait.duty_cycle)


@dataclass(frozen=True)
class ChannelRange:
    default: float
    initial: tuple[float, float]
    finishing: tuple[float, float]

    def __post_init__(self):
        for lo, hi in (self.initial, self.finishing):
            if lo > hi:
                raise ValueError(f"empty range [{lo}, {hi}]")
        if not self.initial[0] <= self.default <= self.initial[1]:
            raise ValueError(f"default {self.default} outside initial range {self.initial}")
        if not (self.finishing[0] <= self.initial[0] and self.initial[1] <= self.finishing[1]):
            raise ValueError(f"initial range {self.initial} not inside finishing range {self.finishing}")


def _rng(lo, hi):
    return (float(lo), float(hi))


@dataclass(frozen=True)
class CommandRanges:
    vx: ChannelRange = ChannelRange(0.0, _rng(-0.6, 0.6), _rng(-0.6, 2.0))
    vy: ChannelRange = ChannelRange(0.0, _rng(-0.6, 0.6), _rng(-0.6, 0.6))
    omega: ChannelRange = ChannelRange(0.0, _rng(-0.6, 0.6), _rng(-1.0, 1.0))
    f: ChannelRange = ChannelRange(2.0, _rng(1.5, 3.5), _rng(1.5, 3.5))
    l: ChannelRange = ChannelRange(0.15, _rng(0.1, 0.35), _rng(0.1, 0.35))
    h: ChannelRange = ChannelRange(0.0, _rng(-0.3, 0.0), _rng(-0.3, 0.0))
    p: ChannelRange = ChannelRange(0.0, _rng(0.0, 0.4), _rng(0.0, 0.4))
    w: ChannelRange = ChannelRange(0.0, _rng(-1.0, 1.0), _rng(-1.0, 1.0))
    hopping: dict = field(default_factory=lambda: {
        "vx": ChannelRange(0.0, _rng(-0.6, 0.6), _rng(-0.6, 0.6)),
        "vy": ChannelRange(0.0, _rng(-0.6, 0.6), _rng(-0.6, 0.6)),
        "omega": ChannelRange(0.0, _rng(-0.6, 0.6), _rng(-0.6, 0.6)),
        "h": ChannelRange(0.0, _rng(-0.3, 0.0), _rng(-0.3, 0.0)),
    })

    def channel(self, name: str, gait: GaitKind = GaitKind.WALKING) -> ChannelRange:
        if gait is GaitKind.HOPPING and name in self.hopping:
            return self.hopping[name]
        return getattr(self, name)

    def defaults(self) -> dict:
        return {c: getattr(self, c).default for c in SAMPLED_CHANNELS}

    @classmethod
    def collapsed(cls) -> "CommandRanges":
        """Every range shrunk to its default value."""
        base = cls()
        kw = {}
        for c in SAMPLED_CHANNELS:
            d = getattr(base, c).default
            kw[c] = ChannelRange(d, (d, d), (d, d))
        hop = {c: ChannelRange(r.default, (r.default,) * 2, (r.default,) * 2) for c, r in base.hopping.items()}
        return cls(**kw, hopping=hop)


def _parse_pair(text: str) -> tuple[float, float]:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != 2:
        raise ValueError(f"expected 'lo, hi', got {text!r}")
    return float(parts[0]), float(parts[1])


def ranges_from_config(cfg: configparser.ConfigParser, base: CommandRanges | None = None) -> CommandRanges:
    """Override ranges from a ``[ranges]`` (and ``[hopping_ranges]``) section.

    Keys look like ``vx.default = 0``, ``vx.initial = -0.6, 0.6`` and
    ``vx.finishing = -0.6, 2.0``.
    """
    base = base or CommandRanges()

    def apply(section: str, current: dict) -> dict:
        out = dict(current)
        if not cfg.has_section(section):
            return out
        for key, value in cfg.items(section):
            name, _, part = key.partition(".")
            if name not in out:
                raise ValueError(f"[{section}] unknown channel {name!r}")
            r = out[name]
            if part == "default":
                r = replace(r, default=float(value))
            elif part in ("initial", "finishing"):
                r = replace(r, **{part: _parse_pair(value)})
            elif part == "":
                pair = _parse_pair(value)
                r = replace(r, initial=pair, finishing=pair)
            else:
                raise ValueError(f"[{section}] unknown key {key!r}")
            out[name] = r
        return out

    main = apply("ranges", {c: getattr(base, c) for c in SAMPLED_CHANNELS})
    hop = apply("hopping_ranges", dict(base.hopping))
    return CommandRanges(**main, hopping=hop)


def sample_command(ranges: CommandRanges, gait: GaitPreset, rng: np.random.Generator,
                   stage: str = "initial", grid: "SpeedGridState | None" = None,
                   phase: PhaseState | None = None) -> CommandVector:
    """Uniform draw per channel from the currently unlocked ranges.

    With a speed grid, (vx, omega) come from a uniformly chosen unlocked bin.
    Hopping keeps f, l, p, w at their defaults.
    """
    if stage not in ("initial", "finishing"):
        raise ValueError(f"unknown curriculum stage {stage!r}")
    values = {}
    for c in SAMPLED_CHANNELS:
        r = ranges.channel(c, gait.kind)
        lo, hi = getattr(r, stage)
        if lo > hi:
            raise ValueError(f"empty range for {c}")
        if gait.kind is GaitKind.HOPPING and c not in HOPPING_CHANNELS:
            values[c] = r.default
        else:
            values[c] = float(rng.uniform(lo, hi)) if hi > lo else float(lo)
    if grid is not None and gait.kind is not GaitKind.HOPPING:
        values["vx"], values["omega"] = grid.sample(rng)
    cmd = CommandVector(**values).with_gait(gait)
    if phase is None:
        phase = PhaseState.start(gait, values["f"])
    return cmd.with_clocks(phase)


def sample_gait(rng: np.random.Generator, kinds=tuple(GaitKind)) -> GaitKind:
    return kinds[int(rng.integers(len(kinds)))]


@dataclass(frozen=True)
class SpeedGridState:
    """Bins over (vx, omega); ``unlocked[i, j]`` covers vx bin i, omega bin j."""

    vx_edges: np.ndarray
    omega_edges: np.ndarray
    unlocked: np.ndarray
    successes: np.ndarray

    @classmethod
    def create(cls, ranges: CommandRanges | None = None, bin_vx: float = 0.2,
               bin_omega: float = 0.2) -> "SpeedGridState":
        ranges = ranges or CommandRanges()
        vx_edges = _edges(ranges.vx.finishing, bin_vx)
        om_edges = _edges(ranges.omega.finishing, bin_omega)
        vx_c = 0.5 * (vx_edges[:-1] + vx_edges[1:])
        om_c = 0.5 * (om_edges[:-1] + om_edges[1:])
        lo_v, hi_v = ranges.vx.initial
        lo_o, hi_o = ranges.omega.initial
        unlocked = ((vx_c >= lo_v) & (vx_c <= hi_v))[:, None] & ((om_c >= lo_o) & (om_c <= hi_o))[None, :]
        d = (np.searchsorted(vx_edges, ranges.vx.default, side="right") - 1,
             np.searchsorted(om_edges, ranges.omega.default, side="right") - 1)
        d = (min(d[0], len(vx_c) - 1), min(d[1], len(om_c) - 1))
        unlocked[d] = True
        return cls(vx_edges, om_edges, unlocked, np.zeros(unlocked.shape, dtype=int))

    @property
    def shape(self) -> tuple[int, int]:
        return self.unlocked.shape

    def bin_of(self, vx: float, omega: float) -> tuple[int, int]:
        i = int(np.clip(np.searchsorted(self.vx_edges, vx, side="right") - 1, 0, self.shape[0] - 1))
        j = int(np.clip(np.searchsorted(self.omega_edges, omega, side="right") - 1, 0, self.shape[1] - 1))
        return i, j

    def sample(self, rng: np.random.Generator) -> tuple[float, float]:
        cells = np.argwhere(self.unlocked)
        if len(cells) == 0:
            raise ValueError("speed grid has no unlocked bins")
        i, j = cells[int(rng.integers(len(cells)))]
        vx = rng.uniform(self.vx_edges[i], self.vx_edges[i + 1])
        om = rng.uniform(self.omega_edges[j], self.omega_edges[j + 1])
        return float(vx), float(om)


def _edges(bounds: tuple[float, float], width: float) -> np.ndarray:
    lo, hi = bounds
    n = max(1, int(round((hi - lo) / width)))
    return np.linspace(lo, hi, n + 1)


def update_speed_grid(state: SpeedGridState, bin: tuple[int, int], tracking_rewards: tuple[float, float],
                      thresholds: tuple[float, float] = (1.6, 1.6)) -> SpeedGridState:
    """Unlock the 3x3 neighbourhood of ``bin`` when both tracking rewards
    (linear, angular) exceed their thresholds."""
    i, j = bin
    if not state.unlocked[i, j]:
        raise ValueError(f"bin {bin} is locked")
    lin, ang = tracking_rewards
    if not (lin > thresholds[0] and ang > thresholds[1]):
        return state
    unlocked = state.unlocked.copy()
    successes = state.successes.copy()
    successes[i, j] += 1
    unlocked[max(i - 1, 0):i + 2, max(j - 1, 0):j + 2] = True
    return replace(state, unlocked=unlocked, successes=successes)


NOISE_STEP = 0.01


def update_noise_alpha(alpha: float, lin_reward: float, ang_reward: float,
                       thresholds: tuple[float, float] = (1.6, 1.6)) -> float:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    t_lin, t_ang = thresholds
    if lin_reward > t_lin and ang_reward > t_ang:
        alpha += NOISE_STEP
    elif lin_reward < (2.0 / 3.0) * t_lin or ang_reward < (2.0 / 3.0) * t_ang:
        alpha -= NOISE_STEP
    # keep alpha on the 0.01 lattice so 100 steps land exactly on 1.0
    return min(1.0, max(0.0, round(alpha, 10)))


def channel_names() -> tuple[str, ...]:
    return tuple(f.name for f in fields(CommandVector))
