"""Monte Carlo comparison of marginal likelihoods at two parameter values.

The estimand on each side is the posterior expectation of the truncated
ratio min(1, joint_b / joint_a), evaluated purely in the log domain.
The integrand is bounded by 1, so estimates have bounded variance, a
clean normal approximation, and no overflow anywhere.  The first
integral (samples under theta1, ratio toward theta2) exceeds the second
exactly when L(theta1) < L(theta2), and their ratio estimates
L(theta2) / L(theta1), which is how the ascent driver and the reported
log likelihood-ratio both work.

Degenerate joints follow the continuous extension of min(1, r): a
vanishing denominator gives integrand 1, a vanishing numerator gives 0,
and both vanishing is a hard error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.stats import norm

from .errors import (
    ContractViolationError,
    DegenerateSupportError,
    UndefinedRatioError,
    UnsupportedCapabilityError,
)
from .samplers import ChainConfig, ExactStream, MHChain, SampleBatch, ess_from_series

__all__ = [
    "Decision",
    "TruncatedRatioEstimate",
    "ComparisonResult",
    "truncated_log_ratio",
    "estimate_truncated_integral",
    "likelihood_ratio_from_integrals",
    "compare_likelihoods",
]

INITIAL_BATCH = 1024


class Decision(str, Enum):
    """Outcome of a likelihood comparison between theta1 and theta2."""

    FIRST_SMALLER = "first_smaller"     # L(theta1) < L(theta2)
    SECOND_SMALLER = "second_smaller"   # L(theta2) < L(theta1)
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class TruncatedRatioEstimate:
    """Monte Carlo estimate of one truncated-ratio integral."""

    mean: float
    std_error: float
    n_samples: int
    ess: float


@dataclass(frozen=True)
class ComparisonResult:
    """Decision plus both integral estimates and the derived log ratio.

    ``log_lr_estimate`` estimates log L(theta2) - log L(theta1); it is
    infinite when one integral estimate is exactly zero.
    """

    decision: Decision
    est1: TruncatedRatioEstimate
    est2: TruncatedRatioEstimate
    log_lr_estimate: float
    log_lr_std_error: float
    confidence: float
    samples_spent: int


def truncated_log_ratio(delta_log: float) -> float:
    """min(1, exp(delta_log)) computed without ever overflowing.

    ``delta_log`` is a log-density difference; any extended real except
    NaN is accepted.  Returns exactly 1 for nonnegative inputs and
    underflows gracefully toward 0 for very negative ones.
    """
    d = float(delta_log)
    if math.isnan(d):
        raise ContractViolationError("delta_log must not be NaN")
    return math.exp(min(0.0, d))


def _truncated_values(log_a: np.ndarray, log_b: np.ndarray) -> np.ndarray:
    """Vectorized integrand with the degenerate-support rules applied."""
    neg_a = np.isneginf(log_a)
    neg_b = np.isneginf(log_b)
    if np.any(neg_a & neg_b):
        raise DegenerateSupportError(
            "both joint densities vanish at a sampled latent point"
        )
    with np.errstate(invalid="ignore"):
        delta = log_b - log_a
    values = np.exp(np.minimum(0.0, delta))
    values[neg_a] = 1.0
    values[neg_b] = 0.0
    return values


def _unpack_samples(model, theta_a, samples):
    if isinstance(samples, SampleBatch):
        if not np.array_equal(samples.theta, theta_a):
            raise ContractViolationError(
                "sample batch targets a different theta than theta_a"
            )
        return samples.points, samples.kind
    points = np.asarray(samples)
    if points.ndim == 1:
        points = points[:, None]
    return points, "unknown"


def estimate_truncated_integral(model, theta_a, theta_b, samples,
                                weights=None) -> TruncatedRatioEstimate:
    """Estimate the truncated-ratio integral from posterior draws.

    ``samples`` are latent points drawn from the posterior at
    ``theta_a``, either a :class:`SampleBatch` or a raw (n, k) array.
    The standard error divides the sample variance by an effective
    sample size: n for exact batches, the autocorrelation-adjusted count
    for chain output, and the usual weight-imbalance count when
    importance ``weights`` are supplied.
    """
    theta_a = model.validate_theta(theta_a)
    theta_b = model.validate_theta(theta_b)
    points, kind = _unpack_samples(model, theta_a, samples)
    n = points.shape[0]
    if n < 1:
        raise ContractViolationError("samples must be nonempty")

    log_a = model.log_joint_batch(theta_a, points)
    log_b = model.log_joint_batch(theta_b, points)
    values = _truncated_values(log_a, log_b)

    if weights is not None:
        w = np.asarray(weights, dtype=float)
        if w.shape != (n,):
            raise ContractViolationError("weights must match the sample count")
        if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
            raise ContractViolationError("weights must be positive and finite")
        wn = w / w.sum()
        mean = float(wn @ values)
        variance = float(wn @ (values - mean) ** 2)
        ess = float(w.sum() ** 2 / (w @ w))
    else:
        mean = float(values.mean())
        variance = float(values.var())
        ess = float(n) if kind == "exact" else ess_from_series(values)

    std_error = math.sqrt(variance / ess) if variance > 0.0 else 0.0
    return TruncatedRatioEstimate(mean=mean, std_error=std_error,
                                  n_samples=n, ess=ess)


def likelihood_ratio_from_integrals(est1: TruncatedRatioEstimate,
                                    est2: TruncatedRatioEstimate) -> tuple[float, float]:
    """log L(theta2) - log L(theta1) with a first-order propagated error.

    Both integrals equal the overlap mass divided by their respective
    marginal, so their ratio is the likelihood ratio itself.
    """
    if est1.mean <= 0.0 or est2.mean <= 0.0:
        raise UndefinedRatioError("integral estimates must be positive to form a ratio")
    log_lr = math.log(est1.mean) - math.log(est2.mean)
    rel1 = est1.std_error / est1.mean
    rel2 = est2.std_error / est2.mean
    return log_lr, math.hypot(rel1, rel2)


def _make_stream(model, theta, sampler_config: ChainConfig, seed_seq):
    if model.capabilities.has_exact_posterior_sampler:
        return ExactStream(model, theta, seed_seq)
    if not model.latent_space.is_discrete:
        return MHChain(model, theta, sampler_config, seed=seed_seq)
    raise UnsupportedCapabilityError(
        "model has neither an exact posterior sampler nor a continuous latent space"
    )


def _log_lr_fields(est1, est2):
    if est1.mean > 0.0 and est2.mean > 0.0:
        return likelihood_ratio_from_integrals(est1, est2)
    if est1.mean > 0.0:
        return math.inf, math.nan
    if est2.mean > 0.0:
        return -math.inf, math.nan
    return math.nan, math.nan


def compare_likelihoods(model, theta1, theta2, sampler_config: ChainConfig,
                        confidence: float = 0.95,
                        max_samples: int = 2 ** 17) -> ComparisonResult:
    """Sequentially decide whether L(theta1) < L(theta2).

    Two independent posterior streams are drawn, one per theta, and the
    batch size doubles from 1024 per side until the z statistic on the
    difference of the two integral estimates clears the one-sided normal
    quantile of ``confidence``, or until ``max_samples`` per side is
    exhausted (Inconclusive).  Exact equality is never certified.
    """
    if not (0.5 < confidence < 1.0):
        raise ContractViolationError("confidence must lie in (0.5, 1)")
    if max_samples < INITIAL_BATCH:
        raise ContractViolationError(
            f"max_samples must be at least the initial batch of {INITIAL_BATCH}"
        )
    theta1 = model.validate_theta(theta1)
    theta2 = model.validate_theta(theta2)

    seed1, seed2 = np.random.SeedSequence(sampler_config.seed).spawn(2)
    stream1 = _make_stream(model, theta1, sampler_config, seed1)
    stream2 = _make_stream(model, theta2, sampler_config, seed2)

    z_threshold = float(norm.ppf(confidence))
    points1 = points2 = None
    target = INITIAL_BATCH
    decision = Decision.INCONCLUSIVE
    while True:
        grow1 = stream1.draw(target if points1 is None else target - points1.shape[0])
        grow2 = stream2.draw(target if points2 is None else target - points2.shape[0])
        points1 = grow1 if points1 is None else np.concatenate([points1, grow1])
        points2 = grow2 if points2 is None else np.concatenate([points2, grow2])

        batch1 = SampleBatch(points=points1, acceptance_rate=stream1.acceptance_rate,
                             theta=theta1, kind=stream1.kind)
        batch2 = SampleBatch(points=points2, acceptance_rate=stream2.acceptance_rate,
                             theta=theta2, kind=stream2.kind)
        est1 = estimate_truncated_integral(model, theta1, theta2, batch1)
        est2 = estimate_truncated_integral(model, theta2, theta1, batch2)

        difference = est1.mean - est2.mean
        combined = math.hypot(est1.std_error, est2.std_error)
        if combined > 0.0:
            z = difference / combined
        else:
            z = math.inf if difference > 0 else -math.inf if difference < 0 else 0.0
        if z >= z_threshold:
            decision = Decision.FIRST_SMALLER
            break
        if z <= -z_threshold:
            decision = Decision.SECOND_SMALLER
            break
        if target >= max_samples:
            break
        target = min(2 * target, max_samples)

    log_lr, log_lr_se = _log_lr_fields(est1, est2)
    return ComparisonResult(
        decision=decision,
        est1=est1,
        est2=est2,
        log_lr_estimate=log_lr,
        log_lr_std_error=log_lr_se,
        confidence=confidence,
        samples_spent=est1.n_samples + est2.n_samples,
    )
