"""Exact evaluation of the two posterior-averaged truncated-ratio integrals.

For a pair of parameter values the engine cares about three quantities:
the marginals L1 and L2 and the overlap mass M, the integral of the
pointwise minimum of the two joint densities.  The left and right
truncated-ratio integrals are then i1 = M / L1 and i2 = M / L2, so
i1 > i2 exactly when L1 < L2, and i1 * L1 = i2 * L2 = M is an identity
that tests can assert literally.

Finite latent spaces are enumerated exactly; 1-D continuous spaces go
through bracketed trapezoid quadrature.  Everything is accumulated in
the log domain with log-sum-exp, because joint densities over many
latent coordinates underflow linearly in the coordinate count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import (
    ContractViolationError,
    DegenerateSupportError,
    EnumerationCapError,
    NonIntegrableError,
    WrongOracleError,
)
from .models.table import TableModel

__all__ = [
    "DEFAULT_ENUMERATION_CAP",
    "ExactIntegrals",
    "TheoremCheckReport",
    "exact_integrals",
    "quadrature_integrals",
    "verify_theorem",
]

DEFAULT_ENUMERATION_CAP = 2 ** 20

_ENUM_CHUNK = 2 ** 16

# Endpoint integrands must fall this far (in log units) below the peak
# before a quadrature bracket is accepted.
_DECAY_LOG = math.log(1e12)

_RELATIVE_TIE_TOL = 1e-12


@dataclass(frozen=True)
class ExactIntegrals:
    """Both truncated-ratio integrals plus the log quantities behind them.

    ``i1 = exp(log_m - log_l1)`` and ``i2 = exp(log_m - log_l2)``; both
    lie in (0, 1].
    """

    i1: float
    i2: float
    log_m: float
    log_l1: float
    log_l2: float


def _integrals_from_logs(log_l1: float, log_l2: float, log_m: float) -> ExactIntegrals:
    if math.isinf(log_l1) or math.isinf(log_l2):
        raise DegenerateSupportError("a joint density vanishes on the whole latent space")
    if math.isinf(log_m):
        raise DegenerateSupportError("joint densities have disjoint support")
    i1 = min(math.exp(log_m - log_l1), 1.0)
    i2 = min(math.exp(log_m - log_l2), 1.0)
    return ExactIntegrals(i1=i1, i2=i2, log_m=log_m, log_l1=log_l1, log_l2=log_l2)


def _enumerated_log_integrals(model, theta1, theta2, cap):
    space = model.latent_space
    total = space.total_cardinality()
    if total > cap:
        raise EnumerationCapError(
            f"latent space has {total} points, above the enumeration cap of {cap}"
        )
    cards = space.cardinalities
    parts_l1, parts_l2, parts_m = [], [], []
    for start in range(0, total, _ENUM_CHUNK):
        flat = np.arange(start, min(start + _ENUM_CHUNK, total))
        pts = np.column_stack(np.unravel_index(flat, cards))
        lj1 = model.log_joint_batch(theta1, pts)
        lj2 = model.log_joint_batch(theta2, pts)
        parts_l1.append(logsumexp(lj1))
        parts_l2.append(logsumexp(lj2))
        parts_m.append(logsumexp(np.minimum(lj1, lj2)))
    return (float(logsumexp(parts_l1)), float(logsumexp(parts_l2)),
            float(logsumexp(parts_m)))


def exact_integrals(model, theta1, theta2,
                    enumeration_cap: int = DEFAULT_ENUMERATION_CAP) -> ExactIntegrals:
    """Enumerate a finite latent space and return both integrals exactly.

    Raises :class:`WrongOracleError` for continuous latent spaces and
    :class:`EnumerationCapError` when the space has more points than
    ``enumeration_cap``.
    """
    space = model.latent_space
    if not space.is_discrete:
        raise WrongOracleError("exact_integrals requires a finite-discrete latent space")
    theta1 = model.validate_theta(theta1)
    theta2 = model.validate_theta(theta2)
    log_l1, log_l2, log_m = _enumerated_log_integrals(model, theta1, theta2,
                                                      enumeration_cap)
    return _integrals_from_logs(log_l1, log_l2, log_m)


def _log_trapezoid(values: np.ndarray, spacing: float) -> float:
    logw = np.zeros(values.size)
    logw[0] = logw[-1] = math.log(0.5)
    return float(logsumexp(values + logw) + math.log(spacing))


def _grid_logs(model, theta, lo, hi, k):
    xs = np.linspace(lo, hi, k)
    return xs, model.log_joint_batch(theta, xs[:, None])


def _endpoints_decayed(vals: np.ndarray) -> bool:
    peak = vals.max()
    if not np.isfinite(peak):
        return False
    return vals[0] < peak - _DECAY_LOG and vals[-1] < peak - _DECAY_LOG


def _bracket_support(model, theta, max_expansions: int = 200) -> tuple[float, float]:
    """Find an interval whose endpoints carry negligible integrand mass.

    Starts from [-1, 1], grows by 1.5x per side until the integrand at
    both endpoints is 1e-12 of the peak, then re-centers on the
    moment-matched mean plus/minus eight standard deviations and grows
    again if needed.
    """
    lo, hi = -1.0, 1.0
    for _ in range(max_expansions):
        xs, vals = _grid_logs(model, theta, lo, hi, 129)
        if _endpoints_decayed(vals):
            weights = np.exp(vals - vals.max())
            mass = weights.sum()
            mean = float((weights * xs).sum() / mass)
            sd = float(math.sqrt((weights * (xs - mean) ** 2).sum() / mass))
            sd = max(sd, (hi - lo) * 1e-3)
            lo2, hi2 = mean - 8.0 * sd, mean + 8.0 * sd
            for _ in range(max_expansions):
                _, vals2 = _grid_logs(model, theta, lo2, hi2, 129)
                if _endpoints_decayed(vals2):
                    return lo2, hi2
                center, half = 0.5 * (lo2 + hi2), 0.75 * (hi2 - lo2)
                lo2, hi2 = center - half, center + half
            break
        center, half = 0.5 * (lo + hi), 0.75 * (hi - lo)
        lo, hi = center - half, center + half
    raise NonIntegrableError(
        "could not bracket the integrand: no decay after repeated expansion"
    )


def quadrature_integrals(model, theta1, theta2, nodes: int = 1024) -> ExactIntegrals:
    """Trapezoid-quadrature analogue of :func:`exact_integrals` for 1-D latents.

    Both joints are evaluated on one shared grid covering the union of
    their bracketed supports; the grid is refined (node count doubled)
    until all three log integrals stabilize.  ``nodes`` is a floor on
    the number of quadrature nodes, not an exact count.
    """
    space = model.latent_space
    if space.is_discrete or space.dimension != 1:
        raise WrongOracleError("quadrature_integrals requires a 1-D continuous latent space")
    if nodes < 1:
        raise ContractViolationError("nodes must be positive")
    theta1 = model.validate_theta(theta1)
    theta2 = model.validate_theta(theta2)

    lo1, hi1 = _bracket_support(model, theta1)
    lo2, hi2 = _bracket_support(model, theta2)
    lo, hi = min(lo1, lo2), max(hi1, hi2)

    k = 513
    while k < max(int(nodes), 2):
        k = 2 * (k - 1) + 1
    previous = None
    while True:
        xs = np.linspace(lo, hi, k)
        h = (hi - lo) / (k - 1)
        lj1 = model.log_joint_batch(theta1, xs[:, None])
        lj2 = model.log_joint_batch(theta2, xs[:, None])
        current = (_log_trapezoid(lj1, h), _log_trapezoid(lj2, h),
                   _log_trapezoid(np.minimum(lj1, lj2), h))
        if previous is not None:
            drift = max(abs(c - p) for c, p in zip(current, previous))
            if drift < 1e-11 or k > 2 ** 21:
                break
        previous = current
        k = 2 * (k - 1) + 1
    log_l1, log_l2, log_m = current
    return _integrals_from_logs(log_l1, log_l2, log_m)


@dataclass
class TheoremCheckReport:
    """Outcome of randomized sign-equivalence and identity checks."""

    instances: int
    passes: int
    failures: int
    failed_instances: list = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return self.failures == 0


def _sign_with_tie(difference: float, scale: float) -> int:
    if abs(difference) <= _RELATIVE_TIE_TOL * scale:
        return 0
    return 1 if difference > 0 else -1


def check_instance(model, theta1, theta2) -> tuple[bool, dict]:
    """Run the sign-equivalence and product-identity checks on one pair.

    Returns (passed, detail); the detail dict carries everything needed
    to reproduce a failure.
    """
    res = exact_integrals(model, theta1, theta2)
    l1, l2, m = math.exp(res.log_l1), math.exp(res.log_l2), math.exp(res.log_m)
    identity_gap = abs(res.i1 * l1 - res.i2 * l2)
    identity_ok = identity_gap <= 1e-12 * m
    sign_integrals = _sign_with_tie(res.i1 - res.i2, max(res.i1, res.i2))
    sign_marginals = _sign_with_tie(l2 - l1, max(l1, l2))
    sign_ok = sign_integrals == sign_marginals
    detail = {
        "theta1": np.asarray(theta1, dtype=float).tolist(),
        "theta2": np.asarray(theta2, dtype=float).tolist(),
        "i1": res.i1,
        "i2": res.i2,
        "log_l1": res.log_l1,
        "log_l2": res.log_l2,
        "log_m": res.log_m,
        "identity_gap": identity_gap,
        "sign_integrals": sign_integrals,
        "sign_marginals": sign_marginals,
    }
    return identity_ok and sign_ok, detail


def verify_theorem(instance_count: int, seed: int,
                   size_range: tuple[int, int] = (2, 64)) -> TheoremCheckReport:
    """Check the sign equivalence on randomly generated table models.

    Each instance draws a latent size in ``size_range``, two positive
    joint tables, and asserts that the ordering of the two integrals
    matches the (reversed) ordering of the marginals and that
    i1 * L1 = i2 * L2 holds to 1e-12 relative to M.  Deterministic for a
    fixed seed.
    """
    if instance_count < 0:
        raise ContractViolationError("instance_count must be nonnegative")
    lo, hi = size_range
    if lo < 1 or hi < lo:
        raise ContractViolationError("size_range must be a nonempty positive range")
    rng = np.random.default_rng(seed)
    report = TheoremCheckReport(instances=int(instance_count), passes=0, failures=0)
    for index in range(int(instance_count)):
        size = int(rng.integers(lo, hi + 1))
        theta1 = rng.uniform(0.05, 4.0, size)
        theta2 = rng.uniform(0.05, 4.0, size)
        model = TableModel(theta1)
        ok, detail = check_instance(model, theta1, theta2)
        if ok:
            report.passes += 1
        else:
            report.failures += 1
            detail["index"] = index
            report.failed_instances.append(detail)
    return report
