"""Joint layout descriptor: ordering, left/right pairing, mirror signs,
nominal pose and per-joint position limits.

Descriptor files are whitespace-separated text, one joint per line::

    name  mirror_partner  sign  group  nominal  [lower  upper]

Blank lines and ``#`` comments are ignored.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

GROUPS = ("leg", "waist", "arm")
DEFAULT_LIMIT = 1.0


class LayoutError(ValueError):
    pass


@dataclass(frozen=True)
class JointLayout:
    names: tuple[str, ...]
    partner: tuple[int, ...]
    sign: tuple[int, ...]
    group: tuple[str, ...]
    nominal: tuple[float, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        n = len(self.names)
        for field_name in ("partner", "sign", "group", "nominal", "lower", "upper"):
            if len(getattr(self, field_name)) != n:
                raise LayoutError(f"{field_name} has wrong length")
        if len(set(self.names)) != n:
            raise LayoutError("duplicate joint names")
        for i, (j, s) in enumerate(zip(self.partner, self.sign)):
            if s not in (1, -1):
                raise LayoutError(f"sign of {self.names[i]} must be +1 or -1")
            if self.partner[j] != i:
                raise LayoutError(f"mirror pairing of {self.names[i]} is not symmetric")
            if self.sign[j] != s:
                raise LayoutError(f"{self.names[i]} and its partner disagree on sign")
            if self.group[j] != self.group[i]:
                raise LayoutError(f"{self.names[i]} and its partner are in different groups")
        for g in self.group:
            if g not in GROUPS:
                raise LayoutError(f"unknown joint group {g!r}")
        if any(lo >= hi for lo, hi in zip(self.lower, self.upper)):
            raise LayoutError("joint lower limit must be below upper limit")
        nom = np.array(self.nominal)
        mirrored = np.array(self.sign) * nom[list(self.partner)]
        if not np.allclose(mirrored, nom, atol=1e-12):
            raise LayoutError("nominal pose is not mirror symmetric")

    @property
    def n_joints(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def indices(self, group: str) -> np.ndarray:
        return np.array([i for i, g in enumerate(self.group) if g == group], dtype=int)

    @property
    def upper_body(self) -> np.ndarray:
        """Arm joints: the ones an external controller may take over."""
        return self.indices("arm")

    @property
    def hip_xz(self) -> np.ndarray:
        """Hip roll and yaw joints (rotations about x and z)."""
        return np.array(
            [i for i, n in enumerate(self.names) if n.endswith("hip_roll") or n.endswith("hip_yaw")],
            dtype=int,
        )

    @property
    def waist(self) -> int:
        return int(self.indices("waist")[0])

    @property
    def nominal_array(self) -> np.ndarray:
        return np.array(self.nominal)

    @property
    def limits(self) -> tuple[np.ndarray, np.ndarray]:
        return np.array(self.lower), np.array(self.upper)


def parse_layout(text: str) -> JointLayout:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (5, 7):
            raise LayoutError(f"line {lineno}: expected 5 or 7 columns, got {len(parts)}")
        rows.append((lineno, parts))
    names = [p[0] for _, p in rows]
    partner, sign, group, nominal, lower, upper = [], [], [], [], [], []
    for lineno, parts in rows:
        if parts[1] not in names:
            raise LayoutError(f"line {lineno}: unknown mirror partner {parts[1]!r}")
        partner.append(names.index(parts[1]))
        try:
            sign.append(int(parts[2]))
            nominal.append(float(parts[4]))
            if len(parts) == 7:
                lower.append(float(parts[5]))
                upper.append(float(parts[6]))
            else:
                lower.append(float(parts[4]) - DEFAULT_LIMIT)
                upper.append(float(parts[4]) + DEFAULT_LIMIT)
        except ValueError as exc:
            raise LayoutError(f"line {lineno}: {exc}") from exc
        group.append(parts[3])
    return JointLayout(
        tuple(names), tuple(partner), tuple(sign), tuple(group),
        tuple(nominal), tuple(lower), tuple(upper),
    )


def load_layout(path: str | Path) -> JointLayout:
    return parse_layout(Path(path).read_text())


@lru_cache(maxsize=1)
def h1_layout() -> JointLayout:
    text = resources.files("humanoid_wbc").joinpath("data/h1_layout.txt").read_text()
    return parse_layout(text)
