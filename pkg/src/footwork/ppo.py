"""Clipped-surrogate policy optimization with generalized advantage
estimation, on top of the hand-rolled numpy network.

The loss gradient is assembled analytically: the clip picks which samples
contribute a policy gradient, the Gaussian log-density supplies dL/dmean and
dL/dlog_std, and the value MSE supplies dL/dvalue; the network's backward
pass does the rest. Keeping the whole chain explicit lets the test suite
check every gradient against central finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .policy import Adam, PolicyValueNet, clip_grad_norm


@dataclass
class PpoConfig:
    clip_epsilon: float = 0.2
    gamma: float = 0.99
    gae_lambda: float = 0.95
    learning_rate: float = 3e-4
    epochs: int = 4
    minibatch_size: int = 256
    horizon: int = 512
    n_envs: int = 24
    total_steps: int = 200_000
    entropy_coef: float = 0.005
    value_coef: float = 0.5
    max_grad_norm: float = 0.5
    hidden: tuple[int, ...] = (128, 128)
    init_log_std: float = -0.7

    def __post_init__(self) -> None:
        if not (0.0 < self.clip_epsilon < 1.0):
            raise ValueError("clip_epsilon must lie in (0, 1)")
        if not (0.0 <= self.gamma <= 1.0 and 0.0 <= self.gae_lambda <= 1.0):
            raise ValueError("gamma and gae_lambda must lie in [0, 1]")
        if self.n_envs < 1:
            raise ValueError("n_envs must be >= 1")
        if isinstance(self.hidden, list):
            self.hidden = tuple(self.hidden)


@dataclass
class Trajectory:
    """Fixed-horizon rollout storage for one environment instance."""

    observations: np.ndarray  # (T, obs_dim), masked, un-normalized
    actions: np.ndarray  # (T, act_dim), raw pre-squash samples
    log_probs: np.ndarray  # (T,)
    rewards: np.ndarray  # (T,)
    values: np.ndarray  # (T,)
    dones: np.ndarray  # (T,) bool, episode ended after this step
    bootstrap_value: float  # V of the state after the last step

    def __post_init__(self) -> None:
        t = self.observations.shape[0]
        for name in ("actions", "log_probs", "rewards", "values", "dones"):
            if getattr(self, name).shape[0] != t:
                raise ValueError(f"{name} length differs from observations")
        if not np.all(np.isfinite(self.log_probs)):
            raise ValueError("log_probs must be finite")

    def __len__(self) -> int:
        return self.observations.shape[0]


def gae_advantages(
    rewards: np.ndarray,
    values: np.ndarray,
    dones: np.ndarray,
    bootstrap_value: float,
    gamma: float,
    lam: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Reverse-recursive advantage and return estimates.

    ``dones[t]`` cuts both the bootstrap and the accumulated trace at t.
    Returns raw (un-normalized) advantages plus returns = advantages + values.
    """
    horizon = len(rewards)
    advantages = np.zeros(horizon)
    gae = 0.0
    next_value = bootstrap_value
    for t in reversed(range(horizon)):
        live = 0.0 if dones[t] else 1.0
        delta = rewards[t] + gamma * next_value * live - values[t]
        gae = delta + gamma * lam * live * gae
        advantages[t] = gae
        next_value = values[t]
    return advantages, advantages + values


def trajectory_advantages(
    trajectory: Trajectory, gamma: float, lam: float
) -> tuple[np.ndarray, np.ndarray]:
    return gae_advantages(
        trajectory.rewards,
        trajectory.values,
        trajectory.dones,
        trajectory.bootstrap_value,
        gamma,
        lam,
    )


@dataclass
class Batch:
    """Flattened, pooled experience ready for minibatching."""

    observations: np.ndarray
    actions: np.ndarray
    log_probs: np.ndarray
    advantages: np.ndarray
    returns: np.ndarray

    def __len__(self) -> int:
        return self.observations.shape[0]

    def select(self, idx: np.ndarray) -> "Batch":
        return Batch(
            self.observations[idx],
            self.actions[idx],
            self.log_probs[idx],
            self.advantages[idx],
            self.returns[idx],
        )


def pool_trajectories(
    trajectories: list[Trajectory], config: PpoConfig
) -> Batch:
    """Concatenate per-instance trajectories and normalize advantages."""
    obs = np.concatenate([t.observations for t in trajectories])
    acts = np.concatenate([t.actions for t in trajectories])
    logp = np.concatenate([t.log_probs for t in trajectories])
    advs = []
    rets = []
    for t in trajectories:
        a, r = trajectory_advantages(t, config.gamma, config.gae_lambda)
        advs.append(a)
        rets.append(r)
    adv = np.concatenate(advs)
    ret = np.concatenate(rets)
    adv = (adv - adv.mean()) / (adv.std() + 1e-8)
    return Batch(obs, acts, logp, adv, ret)


def loss_and_grads(
    net: PolicyValueNet, batch: Batch, config: PpoConfig
) -> tuple[float, dict[str, np.ndarray], dict[str, float]]:
    """PPO-clip loss and its analytic gradient over one minibatch.

    Observations in the batch are expected already normalized. The clipped
    branch of the surrogate contributes no policy gradient, so the gradient
    through log-prob is simply ratio * advantage on unclipped samples.
    """
    n = len(batch)
    mean, value, cache = net.forward(batch.observations)
    std = net.std()
    z = (batch.actions - mean) / std
    log_probs = -0.5 * np.sum(z * z, axis=1) - np.sum(np.log(std)) - 0.5 * net.act_dim * math.log(2 * math.pi)

    ratio = np.exp(log_probs - batch.log_probs)
    clipped = np.clip(ratio, 1.0 - config.clip_epsilon, 1.0 + config.clip_epsilon)
    surr_raw = ratio * batch.advantages
    surr_clip = clipped * batch.advantages
    policy_loss = -float(np.mean(np.minimum(surr_raw, surr_clip)))

    value_error = value - batch.returns
    value_loss = 0.5 * float(np.mean(value_error * value_error))
    entropy = net.entropy()
    total = policy_loss + config.value_coef * value_loss - config.entropy_coef * entropy

    # dL/dlogp: only samples where the raw surrogate is the active branch
    active = surr_raw <= surr_clip
    d_logp = np.where(active, -ratio * batch.advantages, 0.0) / n
    # Gaussian density backward
    d_mean = d_logp[:, None] * z / std
    d_log_std = np.sum(d_logp[:, None] * (z * z - 1.0), axis=0)
    d_log_std -= config.entropy_coef  # entropy bonus: dH/dlog_std = 1
    d_value = config.value_coef * value_error / n

    grads = net.backward(cache, d_mean, d_value)
    grads["log_std"] = d_log_std
    stats = {
        "policy_loss": policy_loss,
        "value_loss": value_loss,
        "entropy": entropy,
        "clip_fraction": float(np.mean(~active)),
    }
    return total, grads, stats


def ppo_update(
    net: PolicyValueNet,
    optimizer: Adam,
    batch: Batch,
    config: PpoConfig,
    rng: np.random.Generator,
) -> dict[str, float]:
    """Run the epoch/minibatch update schedule over a pooled batch.

    Minibatches with a non-finite loss are skipped and counted, never
    applied.
    """
    if len(batch) == 0:
        raise ValueError("batch must be nonempty")
    stats = {"policy_loss": 0.0, "value_loss": 0.0, "entropy": 0.0,
             "clip_fraction": 0.0, "skipped_minibatches": 0.0, "grad_norm": 0.0}
    updates = 0
    for _ in range(config.epochs):
        order = rng.permutation(len(batch))
        for start in range(0, len(batch), config.minibatch_size):
            idx = order[start : start + config.minibatch_size]
            loss, grads, mb_stats = loss_and_grads(net, batch.select(idx), config)
            if not math.isfinite(loss):
                stats["skipped_minibatches"] += 1.0
                continue
            stats["grad_norm"] += clip_grad_norm(grads, config.max_grad_norm)
            optimizer.step(net.params, grads)
            net.clamp_log_std()
            for key in ("policy_loss", "value_loss", "entropy", "clip_fraction"):
                stats[key] += mb_stats[key]
            updates += 1
    if updates:
        for key in ("policy_loss", "value_loss", "entropy", "clip_fraction", "grad_norm"):
            stats[key] /= updates
    return stats
