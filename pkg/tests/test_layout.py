from __future__ import annotations

import numpy as np
import pytest

from humanoid_wbc.layout import LayoutError, h1_layout, load_layout, parse_layout
from humanoid_wbc.robot_step import N_JOINTS, RobotStep


def test_h1_layout_groups(layout):
    assert layout.n_joints == N_JOINTS == 19
    assert len(layout.upper_body) == 8
    assert [layout.names[i] for i in layout.hip_xz] == [
        "left_hip_yaw", "left_hip_roll", "right_hip_yaw", "right_hip_roll"]
    assert layout.names[layout.waist] == "torso"


def test_partner_is_involution(layout):
    p = np.array(layout.partner)
    assert np.array_equal(p[p], np.arange(19))


def test_round_trip_through_file(tmp_path, layout):
    text = "\n".join(f"{n} {layout.names[p]} {int(s)} {g} {nom}" for n, p, s, g, nom in
                     zip(layout.names, layout.partner, layout.sign, layout.group, layout.nominal))
    path = tmp_path / "layout.txt"
    path.write_text(text)
    again = load_layout(path)
    assert again.names == layout.names and again.partner == layout.partner


@pytest.mark.parametrize("text", [
    "a b 1 leg 0\n",                                 # partner missing
    "a b 1 leg 0\nb a -1 leg 0\n",                  # signs disagree
    "a b 1 fin 0\nb a 1 fin 0\n",                   # unknown group
    "a b 1 leg 0.1\nb a 1 leg 0.2\n",              # nominal not symmetric
    "a b 1 leg\n",                                  # too few columns
])
def test_parse_errors(text):
    with pytest.raises(LayoutError):
        parse_layout(text)


def test_robot_step_validation():
    s = RobotStep.zeros()
    assert s.swing_height.shape == (2,)
    with pytest.raises(ValueError):
        RobotStep.zeros(q=np.zeros(18))
    with pytest.raises(ValueError):
        RobotStep.zeros(tau=np.full(19, np.nan))
    with pytest.raises(ValueError):
        RobotStep.zeros(foot_force=np.array([[0, 0, -1.0], [0, 0, 0]]))


def test_robot_step_round_trip():
    s = RobotStep.zeros(q=h1_layout().nominal_array, intervention=True, body_height=-0.1)
    again = RobotStep.from_dict(s.to_dict())
    assert again.intervention and again.body_height == -0.1
    assert np.array_equal(again.q, s.q)
