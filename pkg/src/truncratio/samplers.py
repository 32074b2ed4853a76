"""Posterior sampling and chain diagnostics.

Two sampling routes exist.  Models whose posterior factorizes over
discrete coordinates draw exact independent samples; everything else
with a continuous latent goes through adaptive random-walk
Metropolis-Hastings, which needs only the log joint density (the
posterior is known only up to the marginal likelihood, and the
acceptance ratio cancels it).

Step-size adaptation runs during burn-in only and is frozen afterwards,
preserving detailed balance over the sampling phase.  Chains own their
RNG streams; batches are immutable once returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadInitializationError,
    ContractViolationError,
    StuckChainError,
    UnsupportedCapabilityError,
    WrongOracleError,
)

__all__ = [
    "ChainConfig",
    "SampleBatch",
    "MHChain",
    "sample_discrete_posterior",
    "rwmh_sample",
    "effective_sample_size",
]

# Multiplicative adaptation rate: on accept the step grows by roughly
# exp(rate), on reject it shrinks by roughly exp(-rate), with the two
# factors skewed so the equilibrium acceptance equals the target.
_ADAPT_RATE = 0.02

_RNG_BLOCK = 4096


@dataclass(frozen=True)
class ChainConfig:
    """Random-walk chain settings.  The seed is always explicit.

    ``target_acceptance`` of ``None`` resolves to 0.44 for a 1-D latent
    and 0.234 otherwise.
    """

    seed: int
    burn_in: int = 2000
    thinning: int = 1
    initial_step: float = 1.0
    target_acceptance: float | None = None

    def __post_init__(self):
        if self.burn_in < 0:
            raise ContractViolationError("burn_in must be nonnegative")
        if self.thinning < 1:
            raise ContractViolationError("thinning must be positive")
        if not (self.initial_step > 0):
            raise ContractViolationError("initial_step must be positive")
        if self.target_acceptance is not None and not (0.0 < self.target_acceptance < 1.0):
            raise ContractViolationError("target_acceptance must lie in (0, 1)")

    def resolved_target(self, dimension: int) -> float:
        if self.target_acceptance is not None:
            return self.target_acceptance
        return 0.44 if dimension == 1 else 0.234


@dataclass(frozen=True)
class SampleBatch:
    """An ordered batch of posterior draws targeting one theta.

    ``kind`` is "exact" for independent factorized draws and "mh" for
    chain output; exact batches report acceptance_rate 1.0.
    """

    points: np.ndarray
    acceptance_rate: float
    theta: np.ndarray
    kind: str

    @property
    def n(self) -> int:
        return self.points.shape[0]


class ExactStream:
    """Incremental exact posterior draws with a persistent RNG."""

    kind = "exact"

    def __init__(self, model, theta, seed):
        caps = model.capabilities
        if not caps.has_exact_posterior_sampler:
            raise UnsupportedCapabilityError(
                f"{type(model).__name__} has no exact posterior sampler"
            )
        self._model = model
        self._theta = model.validate_theta(theta)
        self._rng = np.random.default_rng(seed)
        self.acceptance_rate = 1.0

    @property
    def theta(self) -> np.ndarray:
        return self._theta

    def draw(self, n: int) -> np.ndarray:
        return self._model.sample_posterior_exact(self._theta, n, self._rng)


class MHChain:
    """Persistent spherical-Gaussian random-walk chain.

    Burn-in (with step adaptation) runs once at construction; subsequent
    :meth:`draw` calls extend the same trajectory, so drawing n then m
    points yields exactly the prefix-consistent n+m points.
    """

    kind = "mh"

    def __init__(self, model, theta, config: ChainConfig, seed=None):
        space = model.latent_space
        if space.is_discrete:
            raise WrongOracleError("random-walk sampling requires a continuous latent space")
        self._dim = space.n_coords
        self._theta = model.validate_theta(theta)
        self._logp = model.log_joint_fn(self._theta)
        self._config = config
        self._rng = np.random.default_rng(config.seed if seed is None else seed)
        self._step = float(config.initial_step)
        self._target = config.resolved_target(self._dim)

        self._state = np.zeros(self._dim)
        self._state_logp = float(self._logp(self._state))
        if not np.isfinite(self._state_logp):
            raise BadInitializationError(
                "chain initial state has zero joint density"
            )

        self._accepted_sampling = 0
        self._steps_sampling = 0
        self._run_burn_in()

    @property
    def theta(self) -> np.ndarray:
        return self._theta

    @property
    def step_size(self) -> float:
        return self._step

    @property
    def acceptance_rate(self) -> float:
        if self._steps_sampling == 0:
            return 0.0
        return self._accepted_sampling / self._steps_sampling

    def _advance(self) -> bool:
        # Noise and uniform are always drawn, so the RNG stream is
        # consumed identically on accept and reject paths.
        noise = self._rng.standard_normal(self._dim)
        uniform = self._rng.random()
        proposal = self._state + self._step * noise
        prop_logp = float(self._logp(proposal))
        if not np.isfinite(prop_logp):
            return False
        delta = prop_logp - self._state_logp
        accept = delta >= 0.0 or uniform == 0.0 or math.log(uniform) < delta
        if accept:
            self._state = proposal
            self._state_logp = prop_logp
        return accept

    def _run_burn_in(self):
        burn = self._config.burn_in
        accepted = 0
        for _ in range(burn):
            ok = self._advance()
            accepted += ok
            self._step *= math.exp(_ADAPT_RATE * ((1.0 if ok else 0.0) - self._target))
        if burn > 0 and accepted == 0:
            raise StuckChainError(
                f"no proposal accepted in {burn} burn-in steps (step size {self._step:.3g})"
            )

    def draw(self, n: int) -> np.ndarray:
        """Extend the chain and return ``n`` thinned post-burn-in states."""
        if n < 1:
            raise ContractViolationError("sample count must be positive")
        thin = self._config.thinning
        out = np.empty((int(n), self._dim))
        for i in range(int(n)):
            for _ in range(thin):
                self._accepted_sampling += self._advance()
                self._steps_sampling += 1
            out[i] = self._state
        return out


def sample_discrete_posterior(model, theta, n: int, seed: int) -> SampleBatch:
    """``n`` independent exact posterior draws; deterministic given seed."""
    if n < 1:
        raise ContractViolationError("sample count must be positive")
    stream = ExactStream(model, theta, seed)
    points = stream.draw(int(n))
    return SampleBatch(points=points, acceptance_rate=1.0,
                       theta=stream.theta, kind="exact")


def rwmh_sample(model, theta, n: int, config: ChainConfig) -> SampleBatch:
    """``n`` thinned random-walk draws after burn-in; deterministic given config."""
    if n < 1:
        raise ContractViolationError("sample count must be positive")
    chain = MHChain(model, theta, config)
    points = chain.draw(int(n))
    return SampleBatch(points=points, acceptance_rate=chain.acceptance_rate,
                       theta=chain.theta, kind="mh")


def _autocorrelation(series: np.ndarray) -> np.ndarray:
    n = series.size
    centered = series - series.mean()
    size = 1
    while size < 2 * n:
        size *= 2
    spectrum = np.fft.rfft(centered, size)
    acov = np.fft.irfft(spectrum * np.conj(spectrum), size)[:n].real / n
    return acov / acov[0]


def ess_from_series(values) -> float:
    """Autocorrelation-adjusted effective sample size of one scalar series.

    Uses the initial-positive-sequence rule on pairs of consecutive
    autocorrelations, and clamps the result to [1, n].  A constant series
    returns n by convention.
    """
    x = np.asarray(values, dtype=float)
    n = x.size
    if n < 4 or x.min() == x.max():
        return float(n)
    rho = _autocorrelation(x)
    tail = 0.0
    k = 1
    while k + 1 < n:
        pair = rho[k] + rho[k + 1]
        if pair <= 0.0:
            break
        tail += pair
        k += 2
    tau = 1.0 + 2.0 * tail
    return float(min(float(n), max(1.0, n / tau)))


def effective_sample_size(batch: SampleBatch, summary) -> float:
    """ESS of a per-point summary statistic over one batch.

    ``summary`` is either a callable mapping the (n, k) points array to
    an (n,) value array, or a precomputed (n,) array.  Exact-sampler
    batches return n exactly.
    """
    if batch.n < 1:
        raise ContractViolationError("batch must be nonempty")
    if batch.kind == "exact":
        return float(batch.n)
    values = summary(batch.points) if callable(summary) else np.asarray(summary, dtype=float)
    if values.shape != (batch.n,):
        raise ContractViolationError("summary must produce one value per point")
    return ess_from_series(values)
