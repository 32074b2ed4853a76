"""Two-component Gaussian mixture with a shared component width.

The latent variable is the per-observation assignment vector in
{0, 1}^n; component 0 carries mixing weight ``weight`` and mean
``mean1``, component 1 carries ``1 - weight`` and ``mean2``.  Parameter
layout: ``theta = (weight, mean1, mean2, sigma)``.

Because the posterior factorizes over observations, the model has both
an analytic marginal and an exact posterior sampler, which makes it the
main testbed for decision calibration and for the one-step EM baseline.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ContractViolationError
from .base import LatentSpace, LatentVariableModel, ModelCapabilities

__all__ = [
    "GaussianMixtureModel",
    "make_gaussian_mixture",
    "em_step",
    "simulate_mixture_data",
]

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

WEIGHT_MIN = 1e-6
SIGMA_MIN = 1e-6
_VARIANCE_FLOOR = 1e-12


def _normal_logpdf(x, mean, sigma):
    z = (x - mean) / sigma
    return -0.5 * z * z - math.log(sigma) - _HALF_LOG_2PI


class GaussianMixtureModel(LatentVariableModel):
    """Mixture of two equal-width Gaussians over a fixed 1-D dataset."""

    PARAM_NAMES = ("weight", "mean1", "mean2", "sigma")

    def __init__(self, data):
        y = np.asarray(data, dtype=float)
        if y.ndim != 1 or y.size < 1:
            raise ContractViolationError("data must be a nonempty 1-D sequence")
        if not np.all(np.isfinite(y)):
            raise ContractViolationError("data values must be finite")
        self._data = y
        self._data.flags.writeable = False
        self._space = LatentSpace.finite_discrete((2,) * y.size)

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def n_obs(self) -> int:
        return self._data.size

    @property
    def param_dim(self) -> int:
        return 4

    @property
    def latent_space(self) -> LatentSpace:
        return self._space

    @property
    def capabilities(self) -> ModelCapabilities:
        return ModelCapabilities(has_analytic_marginal=True,
                                 has_exact_posterior_sampler=True)

    def _check_theta(self, theta: np.ndarray) -> None:
        weight, _, _, sigma = theta
        if not (WEIGHT_MIN <= weight <= 1.0 - WEIGHT_MIN):
            raise ContractViolationError(
                f"mixture weight must lie in [{WEIGHT_MIN}, {1.0 - WEIGHT_MIN}]"
            )
        if sigma < SIGMA_MIN:
            raise ContractViolationError(f"sigma must be at least {SIGMA_MIN}")

    def _component_logliks(self, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Per-observation log joint terms for assignments 0 and 1."""
        weight, mean1, mean2, sigma = theta
        c0 = math.log(weight) + _normal_logpdf(self._data, mean1, sigma)
        c1 = math.log1p(-weight) + _normal_logpdf(self._data, mean2, sigma)
        return c0, c1

    def log_joint(self, theta, w) -> float:
        theta = self.validate_theta(theta)
        w = self.validate_latent(w)
        c0, c1 = self._component_logliks(theta)
        return float(np.where(w == 1, c1, c0).sum())

    def log_joint_batch(self, theta, points) -> np.ndarray:
        theta = self.validate_theta(theta)
        pts = np.asarray(points)
        if pts.ndim != 2 or pts.shape[1] != self.n_obs:
            raise ContractViolationError(
                f"points must have shape (n, {self.n_obs})"
            )
        c0, c1 = self._component_logliks(theta)
        return c0.sum() + pts.astype(float) @ (c1 - c0)

    def log_marginal_analytic(self, theta) -> float:
        theta = self.validate_theta(theta)
        c0, c1 = self._component_logliks(theta)
        return float(np.logaddexp(c0, c1).sum())

    def responsibilities(self, theta) -> np.ndarray:
        """Per-observation posterior probability of assignment 1."""
        theta = self.validate_theta(theta)
        c0, c1 = self._component_logliks(theta)
        return np.exp(c1 - np.logaddexp(c0, c1))

    def sample_posterior_exact(self, theta, n: int, rng: np.random.Generator) -> np.ndarray:
        if n < 1:
            raise ContractViolationError("sample count must be positive")
        r1 = self.responsibilities(theta)
        return (rng.random((int(n), self.n_obs)) < r1).astype(np.int64)

    def parameter_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lower = np.array([WEIGHT_MIN, -np.inf, -np.inf, SIGMA_MIN])
        upper = np.array([1.0 - WEIGHT_MIN, np.inf, np.inf, np.inf])
        return lower, upper


def make_gaussian_mixture(data, weight, mean1, mean2, sigma) -> GaussianMixtureModel:
    """Build the mixture model over ``data``, validating a reference theta.

    The returned model is a function of the data only; the theta passed
    here is checked against the model invariants and kept as
    ``model.theta0`` for callers that want a starting point.
    """
    model = GaussianMixtureModel(data)
    model.theta0 = model.validate_theta([weight, mean1, mean2, sigma])
    return model


def em_step(model: GaussianMixtureModel, theta) -> np.ndarray:
    """One expectation-maximization update of ``theta``.

    The E-step computes per-observation responsibilities under ``theta``;
    the M-step re-estimates the weight, both means, and the pooled
    common variance (floored to keep the parameters in-contract).  The
    analytic log marginal never decreases across a step.
    """
    theta = model.validate_theta(theta)
    y = model.data
    r1 = model.responsibilities(theta)
    r0 = 1.0 - r1

    n0 = max(float(r0.sum()), 1e-300)
    n1 = max(float(r1.sum()), 1e-300)
    weight = float(r0.mean())
    mean1 = float((r0 * y).sum() / n0)
    mean2 = float((r1 * y).sum() / n1)
    variance = float((r0 * (y - mean1) ** 2 + r1 * (y - mean2) ** 2).sum() / y.size)
    sigma = math.sqrt(max(variance, _VARIANCE_FLOOR))

    weight = min(max(weight, WEIGHT_MIN), 1.0 - WEIGHT_MIN)
    sigma = max(sigma, SIGMA_MIN)
    return np.array([weight, mean1, mean2, sigma])


def simulate_mixture_data(n: int, weight, mean1, mean2, sigma, seed: int) -> np.ndarray:
    """Draw ``n`` observations from the mixture with the given truth."""
    if n < 1:
        raise ContractViolationError("n must be positive")
    rng = np.random.default_rng(seed)
    first = rng.random(int(n)) < weight
    means = np.where(first, mean1, mean2)
    return means + sigma * rng.standard_normal(int(n))
