"""Stochastic likelihood ascent driven by pairwise comparisons.

Each iteration proposes a Gaussian perturbation of the current
parameters, asks the comparison engine whether the proposal has the
larger marginal likelihood, and moves only on an affirmative answer.
The proposal scale follows a multiplicative success rule: grow on
accept, shrink on reject (including inconclusive comparisons, which
deliberately never move the estimate), stopping at a scale floor or an
iteration cap.  Every step is recorded, so traces are fully auditable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import AscentAbortedError, ContractViolationError, TruncratioError
from .estimator import Decision, compare_likelihoods
from .samplers import ChainConfig

__all__ = [
    "AscentConfig",
    "IterationRecord",
    "AscentTrace",
    "gaussian_propose",
    "maximize",
]

SCALE_FLOOR = "scale_floor"
ITERATION_CAP = "iteration_cap"


@dataclass(frozen=True)
class AscentConfig:
    """Settings for one ascent run.  The seed is always explicit."""

    initial_scale: float
    max_iterations: int
    seed: int
    shrink: float = 0.7
    grow: float = 1.1
    min_scale: float = 1e-4
    comparison_confidence: float = 0.95
    comparison_budget: int = 16384

    def __post_init__(self):
        if not (self.initial_scale > 0):
            raise ContractViolationError("initial_scale must be positive")
        if not (0 < self.min_scale < self.initial_scale):
            raise ContractViolationError("min_scale must lie in (0, initial_scale)")
        if not (0.0 < self.shrink < 1.0):
            raise ContractViolationError("shrink must lie in (0, 1)")
        if self.grow < 1.0:
            raise ContractViolationError("grow must be at least 1")
        if not (0.5 < self.comparison_confidence < 1.0):
            raise ContractViolationError("comparison_confidence must lie in (0.5, 1)")
        if self.max_iterations < 0:
            raise ContractViolationError("max_iterations must be nonnegative")
        if self.comparison_budget < 1024:
            raise ContractViolationError("comparison_budget must be at least 1024")


@dataclass(frozen=True)
class IterationRecord:
    """One ascent step: the state before it, the proposal, and the outcome."""

    index: int
    theta: np.ndarray
    proposed: np.ndarray
    decision: Decision
    scale: float
    accepted: bool
    samples_spent: int


@dataclass
class AscentTrace:
    """Complete record of an ascent run."""

    iterations: list[IterationRecord] = field(default_factory=list)
    final_theta: np.ndarray | None = None
    terminated_by: str | None = None

    @property
    def accepted_count(self) -> int:
        return sum(record.accepted for record in self.iterations)


def _reflect_into_box(x: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    out = np.array(x, dtype=float)
    two_sided = np.isfinite(lower) & np.isfinite(upper)
    width = upper - lower
    fold = two_sided & (width > 0)
    if np.any(fold):
        period = 2.0 * width[fold]
        y = np.mod(out[fold] - lower[fold], period)
        out[fold] = lower[fold] + np.minimum(y, period - y)
    pinned = two_sided & (width == 0)
    out[pinned] = lower[pinned]
    low_only = np.isfinite(lower) & ~np.isfinite(upper) & (out < lower)
    out[low_only] = 2.0 * lower[low_only] - out[low_only]
    high_only = ~np.isfinite(lower) & np.isfinite(upper) & (out > upper)
    out[high_only] = 2.0 * upper[high_only] - out[high_only]
    return out


def gaussian_propose(theta, scale: float, bounds=None, rng=None) -> np.ndarray:
    """Spherical-Gaussian perturbation of ``theta``, reflected into bounds.

    Reflection keeps the proposal symmetric in the interior limit and
    never leaves the feasible box.  ``rng`` is an integer seed or a
    ``numpy.random.Generator``.
    """
    theta = np.asarray(theta, dtype=float)
    if scale < 0:
        raise ContractViolationError("scale must be nonnegative")
    if bounds is None:
        lower = np.full(theta.size, -np.inf)
        upper = np.full(theta.size, np.inf)
    else:
        lower = np.asarray(bounds[0], dtype=float)
        upper = np.asarray(bounds[1], dtype=float)
    if np.any(lower > upper):
        raise ContractViolationError("feasible box is empty (a lower bound exceeds its upper)")
    if np.any(theta < lower) or np.any(theta > upper):
        raise ContractViolationError("theta must lie inside the feasible box")
    generator = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    candidate = theta + scale * generator.standard_normal(theta.size)
    return _reflect_into_box(candidate, lower, upper)


def maximize(model, theta0, config: AscentConfig,
             sampler_config: ChainConfig | None = None,
             proposer=None) -> AscentTrace:
    """Comparison-driven hill climb of the marginal likelihood.

    Proposals come from :func:`gaussian_propose` over the model's
    feasible box unless a custom ``proposer(theta, scale, rng)`` is
    supplied.  A proposal is accepted exactly when the comparison
    decides the current point has the smaller likelihood; any other
    outcome rejects it and shrinks the scale.  Per-iteration seeds are
    derived from ``config.seed``, so runs are reproducible end to end.

    Raises :class:`AscentAbortedError` (with the partial trace attached)
    if the estimator fails mid-run.
    """
    theta = model.validate_theta(theta0)
    bounds = model.parameter_bounds()
    base_sampler = sampler_config or ChainConfig(seed=config.seed)

    root = np.random.SeedSequence(config.seed)
    trace = AscentTrace()
    scale = config.initial_scale
    terminated_by = ITERATION_CAP
    for index in range(config.max_iterations):
        if scale < config.min_scale:
            terminated_by = SCALE_FLOOR
            break
        propose_seq, compare_seq = root.spawn(2)
        rng = np.random.default_rng(propose_seq)
        if proposer is None:
            proposed = gaussian_propose(theta, scale, bounds, rng)
        else:
            proposed = np.asarray(proposer(theta, scale, rng), dtype=float)
        chain_seed = int(compare_seq.generate_state(1)[0])
        try:
            result = compare_likelihoods(
                model, theta, proposed,
                sampler_config=replace(base_sampler, seed=chain_seed),
                confidence=config.comparison_confidence,
                max_samples=config.comparison_budget,
            )
        except TruncratioError as exc:
            trace.final_theta = theta
            trace.terminated_by = None
            raise AscentAbortedError(f"comparison failed at iteration {index}: {exc}",
                                     trace=trace) from exc
        accepted = result.decision is Decision.FIRST_SMALLER
        trace.iterations.append(IterationRecord(
            index=index,
            theta=theta,
            proposed=proposed,
            decision=result.decision,
            scale=scale,
            accepted=accepted,
            samples_spent=result.samples_spent,
        ))
        if accepted:
            theta = proposed
            scale *= config.grow
        else:
            scale *= config.shrink

    trace.final_theta = theta
    trace.terminated_by = terminated_by
    return trace
