"""Normal random-effects model: one shared continuous latent effect.

All ``m`` observations share a single latent offset ``b`` with prior
Normal(0, tau^2); each observation is Normal(mu + b, sigma^2).
Parameter layout: ``theta = (mu, tau, sigma)``.

The marginal of the data is multivariate normal with a rank-one
covariance, so a closed-form log marginal is available for oracle
checks, while posterior draws come from the random-walk chain (the
model deliberately does not advertise an exact posterior sampler).
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ContractViolationError
from .base import LatentSpace, LatentVariableModel, ModelCapabilities

__all__ = [
    "RandomEffectsModel",
    "make_random_effects",
    "simulate_random_effects_data",
]

_LOG_2PI = math.log(2.0 * math.pi)

SCALE_MIN = 1e-6


class RandomEffectsModel(LatentVariableModel):
    """Gaussian one-way random effect over a fixed 1-D dataset."""

    PARAM_NAMES = ("mu", "tau", "sigma")

    def __init__(self, data):
        y = np.asarray(data, dtype=float)
        if y.ndim != 1 or y.size < 1:
            raise ContractViolationError("data must be a nonempty 1-D sequence")
        if not np.all(np.isfinite(y)):
            raise ContractViolationError("data values must be finite")
        self._data = y
        self._data.flags.writeable = False
        self._space = LatentSpace.continuous(1)

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def n_obs(self) -> int:
        return self._data.size

    @property
    def param_dim(self) -> int:
        return 3

    @property
    def latent_space(self) -> LatentSpace:
        return self._space

    @property
    def capabilities(self) -> ModelCapabilities:
        return ModelCapabilities(has_analytic_marginal=True,
                                 has_exact_posterior_sampler=False)

    def _check_theta(self, theta: np.ndarray) -> None:
        _, tau, sigma = theta
        if tau < SCALE_MIN or sigma < SCALE_MIN:
            raise ContractViolationError(f"tau and sigma must be at least {SCALE_MIN}")

    def _suff_stats(self, mu: float) -> tuple[float, float]:
        r = self._data - mu
        return float(r.sum()), float((r * r).sum())

    def log_joint(self, theta, w) -> float:
        theta = self.validate_theta(theta)
        b = float(self.validate_latent(w)[0])
        return self.log_joint_fn(theta)(b)

    def log_joint_fn(self, theta):
        theta = self.validate_theta(theta)
        mu, tau, sigma = theta
        m = self.n_obs
        s1, s2 = self._suff_stats(mu)
        tau2, sigma2 = tau * tau, sigma * sigma
        const = (-0.5 * math.log(tau2) - 0.5 * _LOG_2PI
                 - 0.5 * m * (math.log(sigma2) + _LOG_2PI)
                 - 0.5 * s2 / sigma2)

        def logp(w):
            b = float(np.atleast_1d(w)[0])
            return (const - 0.5 * b * b / tau2
                    + (b * s1 - 0.5 * m * b * b) / sigma2)

        return logp

    def log_joint_batch(self, theta, points) -> np.ndarray:
        theta = self.validate_theta(theta)
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[1] != 1:
            raise ContractViolationError("points must have shape (n, 1)")
        mu, tau, sigma = theta
        m = self.n_obs
        s1, s2 = self._suff_stats(mu)
        tau2, sigma2 = tau * tau, sigma * sigma
        b = pts[:, 0]
        const = (-0.5 * math.log(tau2) - 0.5 * _LOG_2PI
                 - 0.5 * m * (math.log(sigma2) + _LOG_2PI)
                 - 0.5 * s2 / sigma2)
        return const - 0.5 * b * b / tau2 + (b * s1 - 0.5 * m * b * b) / sigma2

    def log_marginal_analytic(self, theta) -> float:
        theta = self.validate_theta(theta)
        mu, tau, sigma = theta
        m = self.n_obs
        s1, s2 = self._suff_stats(mu)
        tau2, sigma2 = tau * tau, sigma * sigma
        # Rank-one covariance sigma^2 I + tau^2 11^T: determinant and
        # inverse in closed form.
        denom = sigma2 + m * tau2
        log_det = (m - 1) * math.log(sigma2) + math.log(denom)
        quad = s2 / sigma2 - tau2 * s1 * s1 / (sigma2 * denom)
        return -0.5 * (m * _LOG_2PI + log_det + quad)


def make_random_effects(data, mu, tau, sigma) -> RandomEffectsModel:
    """Build the random-effects model over ``data``, validating a reference theta."""
    model = RandomEffectsModel(data)
    model.theta0 = model.validate_theta([mu, tau, sigma])
    return model


def simulate_random_effects_data(m: int, mu, tau, sigma, seed: int) -> np.ndarray:
    """Draw ``m`` observations sharing one latent effect with the given truth."""
    if m < 1:
        raise ContractViolationError("m must be positive")
    rng = np.random.default_rng(seed)
    b = tau * rng.standard_normal()
    return mu + b + sigma * rng.standard_normal(int(m))
