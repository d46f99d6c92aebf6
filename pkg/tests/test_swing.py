from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from humanoid_wbc.swing import (
    QuinticSegment, SwingProfile, evaluate_oracle, solve_quintic_oracle, solve_quintic_segment, stride_length,
    stride_offset, target_derivatives, target_height, trajectory_table,
)

profiles = st.builds(SwingProfile, st.floats(0.0, 0.5), st.floats(-0.1, 0.1), st.floats(-0.1, 0.1))


def test_examples():
    assert target_height(0.3, SwingProfile(0.1)) == 0.0
    assert target_height(0.75, SwingProfile(0.2)) == pytest.approx(0.2, abs=1e-15)
    assert target_height(0.625, SwingProfile(0.2)) == pytest.approx(0.1, abs=1e-15)


def test_oracle_examples():
    rise, fall = solve_quintic_oracle(SwingProfile(0.2))
    assert rise(0.75) == pytest.approx(0.2, abs=1e-12)
    assert abs(rise(0.5, 1)) < 1e-9
    assert abs(fall(1.0, 2)) < 1e-9


@pytest.mark.parametrize("pb", [0.5, 0.75])
def test_boundary_derivatives_zero(pb):
    assert target_derivatives(pb, SwingProfile(0.2)) == (0.0, 0.0)


def test_peak_velocity():
    v, a = target_derivatives(0.625, SwingProfile(0.2))
    assert v == pytest.approx(15 / 8 * 0.2 / 0.25, abs=1e-12)
    assert a == pytest.approx(0.0, abs=1e-12)
    grid = np.linspace(0.5, 0.75, 2001)
    assert np.max(target_derivatives(grid, SwingProfile(0.2))[0]) == pytest.approx(v)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        target_height(1.2, SwingProfile(0.1))
    with pytest.raises(ValueError):
        target_height(float("nan"), SwingProfile(0.1))
    with pytest.raises(ValueError):
        SwingProfile(-0.1)
    with pytest.raises(ValueError):
        solve_quintic_segment(0.5, 0.5, 0.0, 1.0)


def test_segment_is_polynomial():
    seg = QuinticSegment((1.0, 0.0, 0.0, 0.0, 0.0, 2.0), (0.0, 1.0))
    assert seg(2.0) == 34.0
    assert seg(1.0, 1) == 5.0
    assert seg(1.0, 2) == 20.0


@settings(max_examples=100, deadline=None)
@given(profiles)
def test_closed_form_matches_oracle(prof):
    grid = np.linspace(0.0, 1.0, 401)
    oracle = evaluate_oracle(grid, solve_quintic_oracle(prof))
    assert np.max(np.abs(target_height(grid, prof) - oracle)) < 1e-9


@settings(max_examples=100, deadline=None)
@given(profiles)
def test_derivatives_match_oracle(prof):
    rise, fall = solve_quintic_oracle(prof)
    grid = np.linspace(0.5, 1.0, 101)
    v, a = target_derivatives(grid, prof)
    seg_v = np.where(grid <= 0.75, rise(grid, 1), fall(grid, 1))
    seg_a = np.where(grid <= 0.75, rise(grid, 2), fall(grid, 2))
    assert np.max(np.abs(v - seg_v)) < 1e-7
    assert np.max(np.abs(a - seg_a)) < 1e-5


@given(st.floats(0.0, 0.5), st.floats(0.0, 1.0))
def test_height_bounded_when_endpoints_zero(l, pb):
    z = target_height(pb, SwingProfile(l))
    assert -1e-15 <= z <= l + 1e-15


def test_stride_heuristic():
    assert stride_length(1.0, 2.0) == pytest.approx(0.25)
    assert stride_offset(0.0, 1.0, 2.0) == pytest.approx(0.125)
    assert stride_offset(0.5, 1.0, 2.0) == pytest.approx(-0.125)
    assert stride_offset(0.75, 1.0, 2.0) == pytest.approx(0.0)


def test_trajectory_table():
    rows = trajectory_table(SwingProfile(0.15), 5)
    assert [r["phibar"] for r in rows] == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert rows[3]["height"] == pytest.approx(0.15)
    assert rows[4]["height"] == pytest.approx(0.0, abs=1e-15)
