"""Independent-Bernoulli search distribution and its adaptive natural-gradient step.

The distribution over d-bit strings is parameterized by per-bit probabilities
theta, kept inside [1/d, 1 - 1/d] so no bit ever saturates. The step size
delta adapts from the norm of an exponentially averaged, Fisher-normalized
gradient ("evolution path"): it grows while progress accumulates along a
consistent direction and shrinks when updates cancel out.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import BitString

ALPHA = 1.5
DELTA_INIT = 1.0


def _as_bits_matrix(xs) -> np.ndarray:
    if isinstance(xs, np.ndarray):
        return np.asarray(xs, dtype=np.float64)
    return np.array([x.to_array() for x in xs], dtype=np.float64)


@dataclass
class BernoulliParams:
    theta: np.ndarray
    theta_min: float
    theta_max: float

    @classmethod
    def uniform(cls, d: int) -> "BernoulliParams":
        return cls(np.full(d, 0.5), 1.0 / d, 1.0 - 1.0 / d)

    @property
    def d(self) -> int:
        return self.theta.shape[0]

    def clamped(self, theta: np.ndarray) -> "BernoulliParams":
        return BernoulliParams(
            np.clip(theta, self.theta_min, self.theta_max), self.theta_min, self.theta_max
        )

    def sample(self, rng: np.random.Generator) -> BitString:
        bits = rng.random(self.d) < self.theta
        return BitString.from_array(bits.astype(np.int64))

    def sample_array(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """(n, d) float64 0/1 matrix of independent draws."""
        return (rng.random((n, self.d)) < self.theta).astype(np.float64)

    def likelihood(self, x: BitString) -> float:
        b = x.to_array()
        return float(np.prod(np.where(b == 1, self.theta, 1.0 - self.theta)))

    def log_likelihood(self, x: BitString) -> float:
        b = x.to_array()
        return float(np.sum(np.log(np.where(b == 1, self.theta, 1.0 - self.theta))))


def natural_gradient(params: BernoulliParams, xs, utilities) -> np.ndarray:
    """Average of u_i * (x_i - theta); the Fisher metric cancels against the
    Bernoulli log-likelihood gradient, leaving this plain difference form."""
    bits = _as_bits_matrix(xs)
    u = np.asarray(utilities, dtype=np.float64)
    return (u[:, None] * (bits - params.theta[None, :])).mean(axis=0)


def fisher_norm(params: BernoulliParams, v: np.ndarray) -> float:
    var = params.theta * (1.0 - params.theta)
    return float(np.sqrt(np.sum(v * v / var)))


def fisher_sqrt_apply(params: BernoulliParams, v: np.ndarray) -> np.ndarray:
    """F^(1/2) v for the diagonal Bernoulli Fisher matrix diag(1/var)."""
    return v / np.sqrt(params.theta * (1.0 - params.theta))


@dataclass
class AsngState:
    params: BernoulliParams
    s_acc: np.ndarray
    gamma: float
    delta: float
    delta_init: float = DELTA_INIT
    alpha: float = ALPHA
    t: int = 0

    @classmethod
    def fresh(cls, d: int, delta_init: float = DELTA_INIT, alpha: float = ALPHA) -> "AsngState":
        return cls(
            params=BernoulliParams.uniform(d),
            s_acc=np.zeros(d),
            gamma=0.0,
            delta=delta_init,
            delta_init=delta_init,
            alpha=alpha,
        )

    @classmethod
    def from_seeds(
        cls, seeds, d: int, delta_init: float = DELTA_INIT, alpha: float = ALPHA
    ) -> "AsngState":
        state = cls.fresh(d, delta_init=delta_init, alpha=alpha)
        state.params = init_from_seeds(seeds, d)
        return state


def init_from_seeds(seeds, d: int) -> BernoulliParams:
    """theta = per-bit mean of the seed strings, clipped into the margins."""
    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one seed string")
    bits = np.array([x.to_array() for x in seeds], dtype=np.float64)
    if bits.shape[1] != d:
        raise ValueError(f"seed dimension {bits.shape[1]} != d={d}")
    base = BernoulliParams.uniform(d)
    return base.clamped(bits.mean(axis=0))


def utilities_for_objective_pair(f1: float, f2: float) -> tuple[float, float]:
    """Two-sample ranking utilities; the first sample wins ties."""
    return (1.0, -1.0) if f1 >= f2 else (-1.0, 1.0)


def asng_update(state: AsngState, xs, utilities) -> AsngState:
    """One natural-gradient step with trust-region-style step-size adaptation.

    A zero gradient (identical samples) leaves everything except the
    iteration counter untouched. The evolution path s is normalized with the
    Fisher factor of the pre-update theta.
    """
    params = state.params
    theta = params.theta
    d = params.d
    grad = natural_gradient(params, xs, utilities)
    grad_norm = fisher_norm(params, grad)
    if grad_norm == 0.0:
        return replace(state, t=state.t + 1)
    eps = state.delta / grad_norm
    new_params = params.clamped(theta + eps * grad)
    beta = state.delta / np.sqrt(d)
    s_new = (1.0 - beta) * state.s_acc + np.sqrt(beta * (2.0 - beta)) * (
        fisher_sqrt_apply(params, grad) / grad_norm
    )
    gamma_new = (1.0 - beta) ** 2 * state.gamma + beta * (2.0 - beta)
    delta_new = min(
        state.delta * np.exp(beta * (float(np.sum(s_new * s_new)) / state.alpha - gamma_new)),
        state.delta_init,
    )
    return AsngState(
        params=new_params,
        s_acc=s_new,
        gamma=gamma_new,
        delta=float(delta_new),
        delta_init=state.delta_init,
        alpha=state.alpha,
        t=state.t + 1,
    )
