"""Gaussian MLP policy with a value head, written directly in numpy.

Gradients are assembled by hand (plain reverse-mode through the tanh trunk)
so they can be checked against finite differences, and so checkpoints carry
nothing but arrays. The mean head and the state-independent log-std define a
diagonal Gaussian over raw actions; callers squash samples with tanh before
handing them to the gait superposition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

LOG_STD_MIN = -5.0
LOG_STD_MAX = 2.0
_LOG_2PI = math.log(2.0 * math.pi)


class PolicyValueNet:
    """Shared tanh trunk, action-mean head, scalar value head, log-std vector.

    Parameters live in a flat dict of float64 arrays keyed by layer name;
    ``forward`` returns a cache consumed by ``backward``.
    """

    def __init__(
        self,
        obs_dim: int,
        act_dim: int,
        hidden: tuple[int, ...] = (128, 128),
        init_log_std: float = -0.7,
        rng: np.random.Generator | None = None,
    ):
        rng = rng or np.random.default_rng(0)
        self.obs_dim = obs_dim
        self.act_dim = act_dim
        self.hidden = tuple(hidden)
        self.params: dict[str, np.ndarray] = {}
        sizes = [obs_dim, *hidden]
        for i, (n_in, n_out) in enumerate(zip(sizes, sizes[1:])):
            scale = math.sqrt(1.0 / n_in)
            self.params[f"w{i}"] = rng.normal(0.0, scale, size=(n_in, n_out))
            self.params[f"b{i}"] = np.zeros(n_out)
        top = sizes[-1]
        # small mean head so initial residuals stay near zero
        self.params["w_mean"] = rng.normal(0.0, 0.01, size=(top, act_dim))
        self.params["b_mean"] = np.zeros(act_dim)
        self.params["w_value"] = rng.normal(0.0, math.sqrt(1.0 / top), size=(top, 1))
        self.params["b_value"] = np.zeros(1)
        self.params["log_std"] = np.full(act_dim, float(init_log_std))

    @property
    def n_layers(self) -> int:
        return len(self.hidden)

    def forward(self, obs: np.ndarray) -> tuple[np.ndarray, np.ndarray, list]:
        """Batched forward pass. Returns (mean (B,A), value (B,), cache)."""
        x = np.atleast_2d(np.asarray(obs, dtype=float))
        activations = [x]
        h = x
        for i in range(self.n_layers):
            h = np.tanh(h @ self.params[f"w{i}"] + self.params[f"b{i}"])
            activations.append(h)
        mean = h @ self.params["w_mean"] + self.params["b_mean"]
        value = (h @ self.params["w_value"] + self.params["b_value"])[:, 0]
        return mean, value, activations

    def backward(
        self, activations: list, d_mean: np.ndarray, d_value: np.ndarray
    ) -> dict[str, np.ndarray]:
        """Gradients of a scalar loss given dL/dmean and dL/dvalue."""
        grads: dict[str, np.ndarray] = {}
        top = activations[-1]
        grads["w_mean"] = top.T @ d_mean
        grads["b_mean"] = d_mean.sum(axis=0)
        dv = d_value[:, None]
        grads["w_value"] = top.T @ dv
        grads["b_value"] = dv.sum(axis=0)
        dh = d_mean @ self.params["w_mean"].T + dv @ self.params["w_value"].T
        for i in reversed(range(self.n_layers)):
            h = activations[i + 1]
            dz = dh * (1.0 - h * h)
            grads[f"w{i}"] = activations[i].T @ dz
            grads[f"b{i}"] = dz.sum(axis=0)
            if i > 0:
                dh = dz @ self.params[f"w{i}"].T
        return grads

    @property
    def log_std(self) -> np.ndarray:
        return self.params["log_std"]

    def std(self) -> np.ndarray:
        return np.exp(np.clip(self.params["log_std"], LOG_STD_MIN, LOG_STD_MAX))

    def clamp_log_std(self) -> None:
        np.clip(self.params["log_std"], LOG_STD_MIN, LOG_STD_MAX, out=self.params["log_std"])

    def log_prob(self, mean: np.ndarray, actions: np.ndarray) -> np.ndarray:
        """Diagonal Gaussian log-density of raw (pre-squash) actions."""
        std = self.std()
        z = (actions - mean) / std
        return -0.5 * np.sum(z * z, axis=1) - np.sum(np.log(std)) - 0.5 * self.act_dim * _LOG_2PI

    def entropy(self) -> float:
        """State-independent entropy of the action distribution."""
        std = self.std()
        return float(np.sum(np.log(std)) + 0.5 * self.act_dim * (1.0 + _LOG_2PI))

    def act(
        self, obs: np.ndarray, noise: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Sample raw actions with externally supplied unit-normal noise.

        Noise is injected by the caller so each environment instance can own
        its RNG stream (parallel and sequential rollouts then draw identical
        samples). Returns (raw actions, log-probs, values).
        """
        mean, value, _ = self.forward(obs)
        actions = mean + self.std() * np.atleast_2d(noise)
        return actions, self.log_prob(mean, actions), value

    def mean_action(self, obs: np.ndarray) -> np.ndarray:
        """Deterministic action (distribution mean), used for evaluation."""
        mean, _, _ = self.forward(obs)
        return mean

    def copy_params(self) -> dict[str, np.ndarray]:
        return {k: v.copy() for k, v in self.params.items()}

    def load_params(self, params: dict[str, np.ndarray]) -> None:
        for key, value in params.items():
            if key not in self.params or self.params[key].shape != value.shape:
                raise ValueError(f"parameter {key!r} missing or shape mismatch")
            self.params[key] = np.array(value, dtype=float)


@dataclass
class RunningNorm:
    """Running mean/variance observation normalizer (Welford, batched).

    Frozen during rollouts and updates; refreshed between iterations so that
    pooled and sequential rollouts see identical statistics.
    """

    size: int
    mean: np.ndarray = field(default=None)
    var: np.ndarray = field(default=None)
    count: float = 1e-4
    clip: float = 10.0

    def __post_init__(self) -> None:
        if self.mean is None:
            self.mean = np.zeros(self.size)
        if self.var is None:
            self.var = np.ones(self.size)

    def update(self, batch: np.ndarray) -> None:
        batch = np.atleast_2d(batch)
        n = batch.shape[0]
        if n == 0:
            return
        batch_mean = batch.mean(axis=0)
        batch_var = batch.var(axis=0)
        delta = batch_mean - self.mean
        total = self.count + n
        self.mean = self.mean + delta * n / total
        m_a = self.var * self.count
        m_b = batch_var * n
        self.var = (m_a + m_b + delta * delta * self.count * n / total) / total
        self.count = total

    def normalize(self, obs: np.ndarray) -> np.ndarray:
        z = (obs - self.mean) / np.sqrt(self.var + 1e-8)
        return np.clip(z, -self.clip, self.clip)

    def state_arrays(self) -> dict[str, np.ndarray]:
        return {
            "norm_mean": self.mean.copy(),
            "norm_var": self.var.copy(),
            "norm_count": np.array([self.count]),
        }

    @classmethod
    def from_state(cls, size: int, arrays: dict[str, np.ndarray]) -> "RunningNorm":
        return cls(
            size=size,
            mean=np.array(arrays["norm_mean"], dtype=float),
            var=np.array(arrays["norm_var"], dtype=float),
            count=float(arrays["norm_count"][0]),
        )


class Adam:
    """Stock Adam over a parameter dict, with state exportable to arrays."""

    def __init__(self, params: dict[str, np.ndarray], lr: float = 3e-4,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        b1c = 1.0 - self.beta1 ** self.t
        b2c = 1.0 - self.beta2 ** self.t
        for key, grad in grads.items():
            self.m[key] = self.beta1 * self.m[key] + (1.0 - self.beta1) * grad
            self.v[key] = self.beta2 * self.v[key] + (1.0 - self.beta2) * grad * grad
            m_hat = self.m[key] / b1c
            v_hat = self.v[key] / b2c
            params[key] = params[key] - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)

    def state_arrays(self) -> dict[str, np.ndarray]:
        out: dict[str, np.ndarray] = {"adam_t": np.array([self.t])}
        for key in self.m:
            out[f"adam_m_{key}"] = self.m[key].copy()
            out[f"adam_v_{key}"] = self.v[key].copy()
        return out

    def load_state_arrays(self, arrays: dict[str, np.ndarray]) -> None:
        self.t = int(arrays["adam_t"][0])
        for key in self.m:
            self.m[key] = np.array(arrays[f"adam_m_{key}"], dtype=float)
            self.v[key] = np.array(arrays[f"adam_v_{key}"], dtype=float)


def clip_grad_norm(grads: dict[str, np.ndarray], max_norm: float) -> float:
    """Scale all gradients so their global L2 norm is at most max_norm."""
    total = math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if total > max_norm and total > 0.0:
        scale = max_norm / total
        for key in grads:
            grads[key] = grads[key] * scale
    return total
