"""PPO surrogate, value targets, estimation loss and the total objective."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


def _nonempty(*arrays) -> list[np.ndarray]:
    out = [np.asarray(a, dtype=float) for a in arrays]
    if any(a.size == 0 for a in out):
        raise ValueError("empty batch")
    if len({a.shape for a in out}) != 1:
        raise ValueError("batches must have equal shapes")
    return out


def ppo_objective(ratios, advantages, epsilon: float = 0.2) -> float:
    r, a = _nonempty(ratios, advantages)
    return float(np.mean(np.minimum(r * a, np.clip(r, 1.0 - epsilon, 1.0 + epsilon) * a)))


def ppo_policy_loss(ratios, advantages, epsilon: float = 0.2) -> float:
    """Clipped surrogate as a loss to minimise (the negated objective)."""
    return -ppo_objective(ratios, advantages, epsilon)


class ValueTargets(NamedTuple):
    returns: np.ndarray
    advantages: np.ndarray
    value_loss: float


def discounted_returns(rewards, gamma: float, dones=None, last_value=0.0) -> np.ndarray:
    """Backward discounted sum along axis 0, cut at ``dones`` and bootstrapped
    from ``last_value`` after the final step."""
    rewards = np.asarray(rewards, dtype=float)
    dones = np.zeros_like(rewards) if dones is None else np.asarray(dones, dtype=float)
    out = np.empty_like(rewards)
    running = np.asarray(last_value, dtype=float) * np.ones_like(rewards[0])
    for t in range(len(rewards) - 1, -1, -1):
        running = rewards[t] + gamma * running * (1.0 - dones[t])
        out[t] = running
    return out


def gae_advantages(rewards, values, gamma: float, lam: float, dones=None, last_value=0.0) -> np.ndarray:
    rewards = np.asarray(rewards, dtype=float)
    values = np.asarray(values, dtype=float)
    dones = np.zeros_like(rewards) if dones is None else np.asarray(dones, dtype=float)
    adv = np.empty_like(rewards)
    running = np.zeros_like(rewards[0])
    next_value = np.asarray(last_value, dtype=float) * np.ones_like(rewards[0])
    for t in range(len(rewards) - 1, -1, -1):
        nonterminal = 1.0 - dones[t]
        delta = rewards[t] + gamma * next_value * nonterminal - values[t]
        running = delta + gamma * lam * nonterminal * running
        adv[t] = running
        next_value = values[t]
    return adv


def value_and_advantage(rewards, values, gamma: float = 0.99, dones=None, last_value=0.0,
                        gae_lambda: float | None = None) -> ValueTargets:
    """Plain discounted returns as value targets; advantage = return - value.

    With ``gae_lambda`` the advantages come from GAE and the targets are
    advantage + value.
    """
    rewards, values = _nonempty(rewards, values)
    if gae_lambda is None:
        returns = discounted_returns(rewards, gamma, dones, last_value)
        adv = returns - values
    else:
        adv = gae_advantages(rewards, values, gamma, gae_lambda, dones, last_value)
        returns = adv + values
    return ValueTargets(returns, adv, value_loss(values, returns))


def value_loss(values, targets) -> float:
    v, t = _nonempty(values, targets)
    return float(np.mean((v - t) ** 2))


def estimation_loss(estimates, targets) -> float:
    e, t = _nonempty(estimates, targets)
    return float(np.mean((e - t) ** 2))


@dataclass(frozen=True)
class LossTerms:
    policy: float
    value: float
    est: float
    sym: float = 0.0
    lambda_policy: float = 1.0
    lambda_est: float = 1.0
    beta: float = 0.5

    @property
    def aac(self) -> float:
        return self.value + self.lambda_policy * self.policy + self.lambda_est * self.est

    @property
    def total(self) -> float:
        return total_objective(self)


def total_objective(terms: LossTerms) -> float:
    for name in ("policy", "value", "est", "sym", "lambda_policy", "lambda_est", "beta"):
        if not math.isfinite(getattr(terms, name)):
            raise ValueError(f"non-finite loss component {name}")
    return terms.aac + terms.beta * terms.sym
