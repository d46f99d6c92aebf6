"""Numpy actor-critic: history encoder, state estimator, low-level policy
and critic MLPs, with hand-written backpropagation of the full loss."""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, fields, replace

import numpy as np

from ..mirror import MirrorMap
from . import observations as obs_dims
from .losses import LossTerms

LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class NetSpec:
    pro_dim: int = obs_dims.PRO_DIM
    history: int = obs_dims.HISTORY
    cmd_dim: int = obs_dims.CMD_DIM
    pri_dim: int = obs_dims.PRI_DIM
    ter_dim: int = obs_dims.TER_DIM
    act_dim: int = obs_dims.ACT_DIM
    est_dim: int = obs_dims.EST_DIM
    latent_dim: int = 32
    encoder_hidden: tuple[int, ...] = (256, 128)
    estimator_hidden: tuple[int, ...] = (64, 32)
    low_level_hidden: tuple[int, ...] = (256, 128, 64)
    critic_hidden: tuple[int, ...] = (512, 256, 128)
    init_log_std: float = 0.0

    @property
    def policy_obs_dim(self) -> int:
        return self.history * self.pro_dim + self.cmd_dim + 1

    @property
    def critic_obs_dim(self) -> int:
        return self.pro_dim + self.pri_dim + self.ter_dim + self.cmd_dim + 1

    @property
    def low_level_in(self) -> int:
        return self.latent_dim + self.est_dim + self.pro_dim + self.cmd_dim + 1

    def scaled(self, width: int = 16) -> "NetSpec":
        """Same topology with every hidden width capped at ``width``."""
        cap = lambda hs: tuple(min(h, width) for h in hs)  # noqa: E731
        return replace(
            self,
            latent_dim=min(self.latent_dim, width),
            encoder_hidden=cap(self.encoder_hidden),
            estimator_hidden=cap(self.estimator_hidden),
            low_level_hidden=cap(self.low_level_hidden),
            critic_hidden=cap(self.critic_hidden),
        )

    def layer_sizes(self) -> dict:
        return {
            "encoder": (self.history * self.pro_dim, *self.encoder_hidden, self.latent_dim),
            "estimator": (self.latent_dim, *self.estimator_hidden, self.est_dim),
            "low_level": (self.low_level_in, *self.low_level_hidden, self.act_dim),
            "critic": (self.critic_obs_dim, *self.critic_hidden, 1),
        }

    @classmethod
    def from_config(cls, cfg: configparser.ConfigParser, section: str = "net") -> "NetSpec":
        spec = cls()
        if not cfg.has_section(section):
            return spec
        kw = {}
        types = {f.name: f.type for f in fields(cls)}
        for key, value in cfg.items(section):
            if key not in types:
                raise ValueError(f"[{section}] unknown key {key!r}")
            if key.endswith("_hidden"):
                kw[key] = tuple(int(v) for v in value.replace(",", " ").split())
            elif key == "init_log_std":
                kw[key] = float(value)
            else:
                kw[key] = int(value)
        return replace(spec, **kw)


def elu(x):
    return np.where(x > 0.0, x, np.expm1(np.minimum(x, 0.0)))


def elu_grad(x):
    return np.where(x > 0.0, 1.0, np.exp(np.minimum(x, 0.0)))


def init_params(spec: NetSpec, rng: np.random.Generator, out_scale: float = 0.01) -> dict:
    params = {}
    for name, sizes in spec.layer_sizes().items():
        n = len(sizes) - 1
        for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
            scale = math.sqrt(2.0 / fan_in)
            if i == n - 1 and name == "low_level":
                scale = out_scale
            params[f"{name}.{i}.W"] = rng.normal(0.0, scale, size=(fan_in, fan_out))
            params[f"{name}.{i}.b"] = np.zeros(fan_out)
    params["log_std"] = np.full(spec.act_dim, spec.init_log_std)
    return params


def zero_params(spec: NetSpec) -> dict:
    return {k: np.zeros_like(v) for k, v in init_params(spec, np.random.default_rng(0)).items()}


def _n_layers(params: dict, name: str) -> int:
    n = 0
    while f"{name}.{n}.W" in params:
        n += 1
    return n


def mlp_forward(params: dict, name: str, x: np.ndarray):
    """ELU hidden layers, linear output. Returns (y, cache)."""
    n = _n_layers(params, name)
    inputs, pre = [], []
    h = x
    for i in range(n):
        inputs.append(h)
        z = h @ params[f"{name}.{i}.W"] + params[f"{name}.{i}.b"]
        pre.append(z)
        h = elu(z) if i < n - 1 else z
    return h, (inputs, pre)


def mlp_backward(params: dict, name: str, cache, dy: np.ndarray, grads: dict) -> np.ndarray:
    """Accumulate parameter gradients into ``grads``; return d/dx."""
    inputs, pre = cache
    n = len(inputs)
    g = dy
    for i in range(n - 1, -1, -1):
        if i < n - 1:
            g = g * elu_grad(pre[i])
        grads[f"{name}.{i}.W"] += inputs[i].T @ g
        grads[f"{name}.{i}.b"] += g.sum(axis=0)
        g = g @ params[f"{name}.{i}.W"].T
    return g


def split_policy_obs(spec: NetSpec, obs: np.ndarray):
    nh = spec.history * spec.pro_dim
    hist = obs[:, :nh]
    current = hist[:, nh - spec.pro_dim:]
    cmd = obs[:, nh:nh + spec.cmd_dim]
    ind = obs[:, nh + spec.cmd_dim:nh + spec.cmd_dim + 1]
    return hist, current, cmd, ind


def actor_forward(params: dict, spec: NetSpec, obs: np.ndarray):
    """Returns (mean action, estimate, cache)."""
    obs = np.atleast_2d(obs)
    if obs.shape[1] != spec.policy_obs_dim:
        raise ValueError(f"policy observation must have {spec.policy_obs_dim} columns, got {obs.shape[1]}")
    hist, current, cmd, ind = split_policy_obs(spec, obs)
    z, enc_cache = mlp_forward(params, "encoder", hist)
    est, est_cache = mlp_forward(params, "estimator", z)
    u = np.concatenate([z, est, current, cmd, ind], axis=1)
    mu, low_cache = mlp_forward(params, "low_level", u)
    return mu, est, (enc_cache, est_cache, low_cache)


def actor_backward(params: dict, spec: NetSpec, cache, dmu: np.ndarray, dest: np.ndarray | None,
                   grads: dict) -> None:
    enc_cache, est_cache, low_cache = cache
    du = mlp_backward(params, "low_level", low_cache, dmu, grads)
    dz = du[:, :spec.latent_dim]
    de = du[:, spec.latent_dim:spec.latent_dim + spec.est_dim]
    if dest is not None:
        de = de + dest
    dz = dz + mlp_backward(params, "estimator", est_cache, de, grads)
    mlp_backward(params, "encoder", enc_cache, dz, grads)


def critic_forward(params: dict, spec: NetSpec, obs: np.ndarray):
    obs = np.atleast_2d(obs)
    if obs.shape[1] != spec.critic_obs_dim:
        raise ValueError(f"critic observation must have {spec.critic_obs_dim} columns, got {obs.shape[1]}")
    v, cache = mlp_forward(params, "critic", obs)
    return v[:, 0], cache


def gaussian_log_prob(actions, mu, log_std):
    z = (actions - mu) * np.exp(-log_std)
    return -0.5 * np.sum(z * z, axis=1) - np.sum(log_std) - 0.5 * mu.shape[1] * LOG_2PI


@dataclass(frozen=True)
class Batch:
    policy_obs: np.ndarray
    critic_obs: np.ndarray
    actions: np.ndarray
    old_log_prob: np.ndarray
    advantages: np.ndarray
    returns: np.ndarray
    est_targets: np.ndarray

    def __post_init__(self):
        n = len(self.policy_obs)
        for f in fields(self):
            arr = getattr(self, f.name)
            if len(arr) != n:
                raise ValueError(f"{f.name} has {len(arr)} rows, expected {n}")

    def __len__(self) -> int:
        return len(self.policy_obs)

    def subset(self, idx) -> "Batch":
        return Batch(*(getattr(self, f.name)[idx] for f in fields(self)))


@dataclass(frozen=True)
class LossConfig:
    lambda_policy: float = 1.0
    lambda_est: float = 1.0
    beta: float = 0.5
    clip: float = 0.2
    sym_reduction: str = "sum"


def loss_and_grad(params: dict, spec: NetSpec, batch: Batch, config: LossConfig = LossConfig(),
                  mirror: MirrorMap | None = None, need_grad: bool = True):
    """Total loss terms and their gradient w.r.t. every parameter.

    Policy loss is the negated clipped surrogate (mean over the batch); value
    and estimation losses are mean squared errors; the symmetry loss acts on
    the mean action and is summed (or averaged) over the batch.
    """
    B = len(batch)
    grads = {k: np.zeros_like(v) for k, v in params.items()}
    log_std = params["log_std"]

    mu, est, cache = actor_forward(params, spec, batch.policy_obs)
    logp = gaussian_log_prob(batch.actions, mu, log_std)
    ratio = np.exp(logp - batch.old_log_prob)
    adv = batch.advantages
    eps = config.clip
    unclipped = ratio * adv
    clipped = np.clip(ratio, 1.0 - eps, 1.0 + eps) * adv
    policy = -float(np.mean(np.minimum(unclipped, clipped)))
    # gradient flows only where the unclipped branch is the minimum
    active = (unclipped <= clipped).astype(float)
    dlogp = -(active * adv * ratio) / B
    inv_var = np.exp(-2.0 * log_std)
    dmu = dlogp[:, None] * (batch.actions - mu) * inv_var
    grads["log_std"] += np.sum(dlogp[:, None] * ((batch.actions - mu) ** 2 * inv_var - 1.0), axis=0)
    dmu = config.lambda_policy * dmu
    grads["log_std"] *= config.lambda_policy

    est_err = est - batch.est_targets
    est_loss = float(np.mean(est_err**2))
    dest = config.lambda_est * 2.0 * est_err / est_err.size

    sym = 0.0
    if mirror is not None and config.beta != 0.0:
        m_obs = mirror.observation(batch.policy_obs)
        mu_m, _, cache_m = actor_forward(params, spec, m_obs)
        resid = mu - mirror.action(mu_m)
        scale = 1.0 if config.sym_reduction == "sum" else 1.0 / B
        sym = float(np.sum(resid**2)) * scale
        dres = config.beta * 2.0 * resid * scale
        dmu = dmu + dres
        if need_grad:
            # d/d mu_m of -F_a(mu_m): F_a(x) = sign * x[perm]
            dmu_m = np.zeros_like(mu_m)
            dmu_m[:, mirror.action.perm] = -dres * mirror.action.sign
            actor_backward(params, spec, cache_m, dmu_m, None, grads)

    v, ccache = critic_forward(params, spec, batch.critic_obs)
    verr = v - batch.returns
    value = float(np.mean(verr**2))

    if need_grad:
        actor_backward(params, spec, cache, dmu, dest, grads)
        mlp_backward(params, "critic", ccache, (2.0 * verr / B)[:, None], grads)

    terms = LossTerms(policy=policy, value=value, est=est_loss, sym=sym,
                      lambda_policy=config.lambda_policy, lambda_est=config.lambda_est, beta=config.beta)
    return terms, grads


def micro_net_forward_backward(spec: NetSpec, batch: Batch, params: dict | None = None,
                               config: LossConfig = LossConfig(), mirror: MirrorMap | None = None,
                               seed: int = 0):
    """Forward pass outputs and analytic gradients of the total loss for a
    small-width network."""
    widths = (*spec.encoder_hidden, *spec.estimator_hidden, *spec.low_level_hidden, *spec.critic_hidden)
    if max(widths) > 16:
        raise ValueError("micro network hidden widths must be at most 16")
    if params is None:
        params = init_params(spec, np.random.default_rng(seed), out_scale=0.5)
    if batch.policy_obs.shape[1] != spec.policy_obs_dim or batch.critic_obs.shape[1] != spec.critic_obs_dim:
        raise ValueError("batch observation shapes do not match the network")
    if batch.actions.shape[1] != spec.act_dim or batch.est_targets.shape[1] != spec.est_dim:
        raise ValueError("batch action/estimate shapes do not match the network")
    mu, est, _ = actor_forward(params, spec, batch.policy_obs)
    v, _ = critic_forward(params, spec, batch.critic_obs)
    terms, grads = loss_and_grad(params, spec, batch, config, mirror)
    return {"actions": mu, "estimates": est, "values": v, "loss": terms}, grads


class Adam:
    def __init__(self, lr: float = 1e-3, b1: float = 0.9, b2: float = 0.999, eps: float = 1e-8,
                 max_grad_norm: float | None = 1.0):
        self.lr, self.b1, self.b2, self.eps = lr, b1, b2, eps
        self.max_grad_norm = max_grad_norm
        self.m: dict = {}
        self.v: dict = {}
        self.t = 0

    def step(self, params: dict, grads: dict) -> None:
        if self.max_grad_norm is not None:
            norm = math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
            if norm > self.max_grad_norm:
                grads = {k: g * (self.max_grad_norm / norm) for k, g in grads.items()}
        self.t += 1
        for k, g in grads.items():
            m = self.m.setdefault(k, np.zeros_like(g))
            v = self.v.setdefault(k, np.zeros_like(g))
            m *= self.b1
            m += (1.0 - self.b1) * g
            v *= self.b2
            v += (1.0 - self.b2) * g * g
            mhat = m / (1.0 - self.b1**self.t)
            vhat = v / (1.0 - self.b2**self.t)
            params[k] -= self.lr * mhat / (np.sqrt(vhat) + self.eps)
