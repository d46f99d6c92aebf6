from __future__ import annotations

import json
from dataclasses import replace

import numpy as np
import pytest

from humanoid_wbc.learn.nets import init_params
from humanoid_wbc.toy_ppo import (
    NumericError, PointMass, ToyConfig, evaluate, mean_symmetry_loss, run_toy_ppo, toy_mirror, toy_spec,
)


def test_zero_budget_reports_initial_policy():
    rep = run_toy_ppo(replace(ToyConfig(), epochs=0), seed=3)
    assert rep.epochs == []
    assert rep.final_error == rep.initial_error


def test_random_baseline_near_half():
    rep = run_toy_ppo(replace(ToyConfig(), epochs=0), seed=0)
    assert 0.3 < rep.random_error < 0.8


def test_short_run_is_deterministic():
    cfg = replace(ToyConfig(), epochs=3)
    a = json.dumps(run_toy_ppo(cfg, seed=5).to_dict(), sort_keys=True)
    b = json.dumps(run_toy_ppo(cfg, seed=5).to_dict(), sort_keys=True)
    assert a == b


def test_log_rows():
    rows = []
    run_toy_ppo(replace(ToyConfig(), epochs=2), seed=1, log=rows.append)
    assert [r["epoch"] for r in rows] == [0, 1]
    assert {"eval_error", "loss_total", "loss_sym"} <= set(rows[0])


def test_beta_zero_drops_symmetry_term():
    rows = []
    run_toy_ppo(replace(ToyConfig(), epochs=1, beta=0.0), seed=1, log=rows.append)
    assert rows[0]["loss_sym"] == 0.0


def test_numeric_failure_raises_with_report():
    with pytest.raises(NumericError) as info:
        run_toy_ppo(replace(ToyConfig(), epochs=2, lr=float("nan")), seed=0)
    assert info.value.report is not None


def test_point_mass_dynamics():
    cfg = ToyConfig()
    env = PointMass(np.array([0.5, -0.5]), cfg)
    r = env.step(np.array([[1.0], [100.0]]))
    assert env.v.tolist() == [pytest.approx(0.1), pytest.approx(2.0)]
    assert r[0] == pytest.approx(np.exp(-0.16 / 0.2))


def test_toy_mirror_is_consistent_with_the_task():
    cfg = ToyConfig()
    spec, m = toy_spec(cfg), toy_mirror(cfg)
    # mirrored command and history equal the negated problem
    obs = np.array([[0.1, 0.2, 0.7, 1.0]])
    assert m.observation(obs).tolist() == [[-0.1, -0.2, -0.7, 1.0]]
    params = init_params(spec, np.random.default_rng(0))
    assert mean_symmetry_loss(params, spec, m, obs) >= 0.0


@pytest.mark.parametrize("beta", [0.0, 0.5])
def test_converges(beta):
    rep = run_toy_ppo(replace(ToyConfig(), beta=beta), seed=1)
    assert rep.final_error < 0.05
    if beta:
        assert rep.final_sym_loss < 0.01


def test_evaluate_random_actions_worse_than_trained_zero():
    cfg = ToyConfig()
    spec = toy_spec(cfg)
    params = init_params(spec, np.random.default_rng(0))
    v = np.zeros(8)
    assert evaluate(params, spec, cfg, v, rng=np.random.default_rng(1)) > evaluate(params, spec, cfg, v)
