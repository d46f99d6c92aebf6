"""PPO on a 1-D point mass, trained with the full loss stack.

State is the velocity ``v``; the command is a target velocity; the action is
an acceleration. Reward is exp(-(v_cmd - v)^2 / 0.2). The mirror map flips the
sign of every velocity channel and of the action.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .learn.losses import value_and_advantage
from .learn.nets import Adam, Batch, LossConfig, NetSpec, actor_forward, critic_forward, gaussian_log_prob, \
    init_params, loss_and_grad
from .mirror import MirrorMap, SignedPermutation


class NumericError(RuntimeError):
    def __init__(self, message: str, report: "ToyReport | None" = None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class ToyConfig:
    epochs: int = 100
    n_envs: int = 64
    horizon: int = 40
    dt: float = 0.1
    max_accel: float = 20.0
    gamma: float = 0.9
    gae_lambda: float | None = None
    lr: float = 3e-3
    lr_final: float = 3e-4
    update_epochs: int = 5
    minibatches: int = 4
    clip: float = 0.2
    beta: float = 0.5
    lambda_policy: float = 1.0
    lambda_est: float = 1.0
    width: int = 16
    history: int = 2
    init_log_std: float = 0.0
    eval_envs: int = 64


def toy_spec(config: ToyConfig) -> NetSpec:
    w = config.width
    return NetSpec(pro_dim=1, history=config.history, cmd_dim=1, pri_dim=1, ter_dim=0, act_dim=1, est_dim=1,
                   latent_dim=min(8, w), encoder_hidden=(w, w), estimator_hidden=(w,),
                   low_level_hidden=(w, w), critic_hidden=(w, w), init_log_std=config.init_log_std)


def toy_mirror(config: ToyConfig) -> MirrorMap:
    obs_sign = np.array([-1.0] * config.history + [-1.0, 1.0])
    return MirrorMap(SignedPermutation.diagonal([-1.0]), SignedPermutation.diagonal(obs_sign))


class PointMass:
    def __init__(self, v_cmd: np.ndarray, config: ToyConfig):
        self.config = config
        self.v_cmd = np.asarray(v_cmd, dtype=float)
        self.v = np.zeros_like(self.v_cmd)
        self.history = np.zeros((len(self.v_cmd), config.history))

    def policy_obs(self) -> np.ndarray:
        n = len(self.v)
        return np.column_stack([self.history, self.v_cmd, np.zeros(n)])

    def critic_obs(self) -> np.ndarray:
        n = len(self.v)
        return np.column_stack([self.v, self.v, self.v_cmd, np.zeros(n)])

    def reset_history(self) -> None:
        self.history = np.roll(self.history, -1, axis=1)
        self.history[:, -1] = self.v

    def step(self, action: np.ndarray) -> np.ndarray:
        c = self.config
        self.v = self.v + c.dt * np.clip(action[:, 0], -c.max_accel, c.max_accel)
        self.reset_history()
        return np.exp(-((self.v_cmd - self.v) ** 2) / 0.2)


@dataclass
class ToyReport:
    config: dict
    seed: int
    initial_error: float
    random_error: float
    epochs: list = field(default_factory=list)
    final_error: float = float("nan")
    final_sym_loss: float = float("nan")

    def to_dict(self) -> dict:
        return asdict(self)


def _new_env(rng: np.random.Generator, n: int, config: ToyConfig) -> PointMass:
    env = PointMass(rng.uniform(-1.0, 1.0, n), config)
    env.reset_history()
    return env


def evaluate(params: dict, spec: NetSpec, config: ToyConfig, v_cmd: np.ndarray,
             rng: np.random.Generator | None = None) -> float:
    """Mean |v - v_cmd| over every step. Deterministic mean actions unless
    ``rng`` is given, in which case actions are N(0, 1) noise."""
    env = PointMass(v_cmd, config)
    env.reset_history()
    errs = []
    for _ in range(config.horizon):
        if rng is None:
            mu, _, _ = actor_forward(params, spec, env.policy_obs())
        else:
            mu = rng.normal(size=(len(v_cmd), 1))
        env.step(mu)
        errs.append(np.abs(env.v - env.v_cmd))
    return float(np.mean(errs))


def eval_observations(params: dict, spec: NetSpec, config: ToyConfig, v_cmd: np.ndarray) -> np.ndarray:
    env = PointMass(v_cmd, config)
    env.reset_history()
    out = []
    for _ in range(config.horizon):
        o = env.policy_obs()
        out.append(o)
        mu, _, _ = actor_forward(params, spec, o)
        env.step(mu)
    return np.concatenate(out)


def mean_symmetry_loss(params: dict, spec: NetSpec, mirror: MirrorMap, obs: np.ndarray) -> float:
    mu, _, _ = actor_forward(params, spec, obs)
    mu_m, _, _ = actor_forward(params, spec, mirror.observation(obs))
    r = mu - mirror.action(mu_m)
    return float(np.sum(r * r) / len(obs))


def collect(params: dict, spec: NetSpec, config: ToyConfig, rng: np.random.Generator):
    env = _new_env(rng, config.n_envs, config)
    pol, cri, acts, logps, rews, vals, ests, errs = [], [], [], [], [], [], [], []
    for _ in range(config.horizon):
        po, co = env.policy_obs(), env.critic_obs()
        mu, _, _ = actor_forward(params, spec, po)
        a = mu + np.exp(params["log_std"]) * rng.normal(size=mu.shape)
        lp = gaussian_log_prob(a, mu, params["log_std"])
        v, _ = critic_forward(params, spec, co)
        ests.append(env.v[:, None].copy())
        r = env.step(a)
        pol.append(po), cri.append(co), acts.append(a), logps.append(lp), rews.append(r), vals.append(v)
        errs.append(np.abs(env.v - env.v_cmd))
    dones = np.zeros((config.horizon, config.n_envs))
    dones[-1] = 1.0
    targets = value_and_advantage(np.array(rews), np.array(vals), config.gamma, dones=dones,
                                  gae_lambda=config.gae_lambda)
    adv = targets.advantages.ravel()
    adv = (adv - adv.mean()) / (adv.std() + 1e-8)
    batch = Batch(
        policy_obs=np.concatenate(pol),
        critic_obs=np.concatenate(cri),
        actions=np.concatenate(acts),
        old_log_prob=np.concatenate(logps),
        advantages=adv,
        returns=targets.returns.ravel(),
        est_targets=np.concatenate(ests),
    )
    return batch, float(np.mean(rews)), float(np.mean(errs))


def run_toy_ppo(config: ToyConfig = ToyConfig(), seed: int = 0, log=None) -> ToyReport:
    """Train and report mean |v - v_cmd| per epoch on held-out commands."""
    root = np.random.SeedSequence(seed)
    init_seq, train_seq, eval_seq = root.spawn(3)
    spec = toy_spec(config)
    mirror = toy_mirror(config)
    params = init_params(spec, np.random.default_rng(init_seq))
    rng = np.random.default_rng(train_seq)
    eval_rng = np.random.default_rng(eval_seq)
    held_out = eval_rng.uniform(-1.0, 1.0, config.eval_envs)
    random_error = evaluate(params, spec, config, held_out, rng=eval_rng)
    report = ToyReport(asdict(config), seed, evaluate(params, spec, config, held_out), random_error)
    loss_cfg = LossConfig(config.lambda_policy, config.lambda_est, config.beta, config.clip, sym_reduction="mean")
    use_mirror = mirror if config.beta != 0.0 else None
    opt = Adam(lr=config.lr)
    n = config.n_envs * config.horizon
    for epoch in range(config.epochs):
        # linear learning-rate annealing
        frac = epoch / max(config.epochs - 1, 1)
        opt.lr = config.lr + frac * (config.lr_final - config.lr)
        batch, mean_reward, train_err = collect(params, spec, config, rng)
        last = None
        for _ in range(config.update_epochs):
            order = rng.permutation(n)
            for idx in np.array_split(order, config.minibatches):
                last, grads = loss_and_grad(params, spec, batch.subset(idx), loss_cfg, use_mirror)
                try:
                    last.total
                except ValueError as exc:
                    report.final_error = evaluate(params, spec, config, held_out)
                    raise NumericError(f"epoch {epoch}: {exc}", report) from exc
                opt.step(params, grads)
        row = {
            "epoch": epoch,
            "mean_reward": mean_reward,
            "train_error": train_err,
            "eval_error": evaluate(params, spec, config, held_out),
            "loss_total": last.total,
            "loss_policy": last.policy,
            "loss_value": last.value,
            "loss_est": last.est,
            "loss_sym": last.sym,
            "log_std": float(params["log_std"][0]),
        }
        report.epochs.append(row)
        if log is not None:
            log(row)
    report.final_error = evaluate(params, spec, config, held_out)
    obs = eval_observations(params, spec, config, held_out)
    report.final_sym_loss = mean_symmetry_loss(params, spec, mirror, obs)
    return report
