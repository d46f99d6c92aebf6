"""Reflection about the sagittal (X-Z) plane as signed permutations on
action and observation vectors, and the symmetry loss."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .layout import JointLayout, h1_layout


@dataclass(frozen=True)
class SignedPermutation:
    """x -> sign * x[perm]."""

    perm: np.ndarray
    sign: np.ndarray

    def __post_init__(self):
        perm = np.asarray(self.perm, dtype=int)
        sign = np.asarray(self.sign, dtype=float)
        if perm.shape != sign.shape or perm.ndim != 1:
            raise ValueError("perm and sign must be 1-D and of equal length")
        if sorted(perm.tolist()) != list(range(len(perm))):
            raise ValueError("perm is not a permutation")
        if not np.all(np.abs(sign) == 1.0):
            raise ValueError("sign entries must be +1 or -1")
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "sign", sign)

    @property
    def dim(self) -> int:
        return len(self.perm)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"expected last dimension {self.dim}, got {x.shape[-1]}")
        return self.sign * x[..., self.perm]

    def is_involution(self) -> bool:
        return bool(np.all(self.perm[self.perm] == np.arange(self.dim))
                    and np.all(self.sign * self.sign[self.perm] == 1.0))

    @classmethod
    def concat(cls, *blocks: "SignedPermutation") -> "SignedPermutation":
        perms, signs, offset = [], [], 0
        for b in blocks:
            perms.append(b.perm + offset)
            signs.append(b.sign)
            offset += b.dim
        return cls(np.concatenate(perms), np.concatenate(signs))

    @classmethod
    def identity(cls, n: int) -> "SignedPermutation":
        return cls(np.arange(n), np.ones(n))

    @classmethod
    def diagonal(cls, signs) -> "SignedPermutation":
        signs = np.asarray(signs, dtype=float)
        return cls(np.arange(len(signs)), signs)


def joint_map(layout: JointLayout) -> SignedPermutation:
    return SignedPermutation(np.array(layout.partner), np.array(layout.sign, dtype=float))


def proprio_map(layout: JointLayout) -> SignedPermutation:
    """Mirror of one proprioceptive frame: angular velocity, gravity,
    joint positions, joint velocities, previous action."""
    j = joint_map(layout)
    ang_vel = SignedPermutation.diagonal([-1.0, 1.0, -1.0])
    gravity = SignedPermutation.diagonal([1.0, -1.0, 1.0])
    return SignedPermutation.concat(ang_vel, gravity, j, j, j)


def command_map() -> SignedPermutation:
    # vx vy omega f l h p w psi phi_stance clock_l clock_r
    perm = np.array([0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 11, 10])
    sign = np.array([1, -1, -1, 1, 1, 1, 1, -1, 1, 1, 1, 1], dtype=float)
    return SignedPermutation(perm, sign)


@dataclass(frozen=True)
class MirrorMap:
    action: SignedPermutation
    observation: SignedPermutation
    layout: JointLayout | None = None

    def __post_init__(self):
        if not self.action.is_involution() or not self.observation.is_involution():
            raise ValueError("mirror maps must be involutions")

    @classmethod
    def for_layout(cls, layout: JointLayout | None = None, history: int = 5) -> "MirrorMap":
        """Actor-observation mirror: ``history`` proprio frames, 12 commands
        and the intervention indicator (left unchanged)."""
        layout = layout or h1_layout()
        frame = proprio_map(layout)
        obs = SignedPermutation.concat(*([frame] * history), command_map(), SignedPermutation.identity(1))
        return cls(joint_map(layout), obs, layout)


def mirror_action(a, mirror: MirrorMap):
    return mirror.action(a)


def mirror_observation(o, mirror: MirrorMap):
    return mirror.observation(o)


def symmetry_residual(policy: Callable[[np.ndarray], np.ndarray], observations, mirror: MirrorMap) -> np.ndarray:
    obs = np.atleast_2d(np.asarray(observations, dtype=float))
    return policy(obs) - mirror.action(policy(mirror.observation(obs)))


def symmetry_loss(policy: Callable[[np.ndarray], np.ndarray], observations, mirror: MirrorMap,
                  reduction: str = "sum") -> float:
    """sum_t || pi(o_t) - F_a(pi(F_o(o_t))) ||^2.

    ``policy`` maps a (batch, obs_dim) array to (batch, act_dim) mean actions.
    ``reduction="mean"`` divides by the batch size.
    """
    r = symmetry_residual(policy, observations, mirror)
    total = float(np.sum(r * r))
    if reduction == "sum":
        return total
    if reduction == "mean":
        return total / r.shape[0]
    raise ValueError(f"unknown reduction {reduction!r}")
