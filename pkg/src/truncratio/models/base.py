"""Core latent-variable model abstraction.

A model couples a fixed observed dataset with a parametric joint density
over that data and a latent variable ``w``.  Everything downstream (the
exact oracles, the Monte Carlo estimator, the ascent driver) consumes a
model through this interface, and the only thing it strictly requires is
the log joint density.  Analytic marginals and exact posterior samplers
are optional capabilities, advertised through :class:`ModelCapabilities`
and used by oracles and tests only, never by the comparison engine.

All densities live in the log domain.  A log joint may be ``-inf`` at
isolated degenerate points, but never ``NaN`` and never ``+inf``.

Models are immutable after construction, so every method is safe to call
concurrently from multiple threads.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from ..errors import ContractViolationError, UnsupportedCapabilityError

__all__ = [
    "LatentSpace",
    "ModelCapabilities",
    "LatentVariableModel",
]


@dataclass(frozen=True)
class LatentSpace:
    """Descriptor of the latent domain and its dominating measure.

    Finite-discrete spaces carry per-coordinate cardinalities and pair
    with the counting measure; continuous spaces carry a dimension and
    pair with Lebesgue measure.  No other combination is representable.
    """

    kind: str
    cardinalities: tuple[int, ...] | None = None
    dimension: int | None = None

    def __post_init__(self):
        if self.kind == "finite_discrete":
            if not self.cardinalities or any(int(c) < 1 for c in self.cardinalities):
                raise ContractViolationError(
                    "finite-discrete latent space requires positive cardinalities"
                )
            if self.dimension is not None:
                raise ContractViolationError(
                    "finite-discrete latent space does not take a dimension"
                )
        elif self.kind == "continuous":
            if self.dimension is None or int(self.dimension) < 1:
                raise ContractViolationError(
                    "continuous latent space requires a positive dimension"
                )
            if self.cardinalities is not None:
                raise ContractViolationError(
                    "continuous latent space does not take cardinalities"
                )
        else:
            raise ContractViolationError(f"unknown latent-space kind {self.kind!r}")

    @classmethod
    def finite_discrete(cls, cardinalities) -> "LatentSpace":
        return cls(kind="finite_discrete",
                   cardinalities=tuple(int(c) for c in cardinalities))

    @classmethod
    def continuous(cls, dimension: int) -> "LatentSpace":
        return cls(kind="continuous", dimension=int(dimension))

    @property
    def measure(self) -> str:
        """Dominating measure paired with this space."""
        return "counting" if self.kind == "finite_discrete" else "lebesgue"

    @property
    def is_discrete(self) -> bool:
        return self.kind == "finite_discrete"

    @property
    def n_coords(self) -> int:
        """Number of latent coordinates (vector length of one point)."""
        if self.is_discrete:
            return len(self.cardinalities)
        return int(self.dimension)

    def total_cardinality(self) -> int:
        """Exact number of points of a finite-discrete space.

        Computed with Python integers, so arbitrarily large products are
        representable; callers compare against their own caps.
        """
        if not self.is_discrete:
            raise ContractViolationError("continuous latent spaces are not enumerable")
        total = 1
        for c in self.cardinalities:
            total *= int(c)
        return total


@dataclass(frozen=True)
class ModelCapabilities:
    """Optional operations a model truthfully advertises."""

    has_analytic_marginal: bool = False
    has_exact_posterior_sampler: bool = False


class LatentVariableModel(ABC):
    """A latent-variable model with its observed data fixed at construction."""

    @property
    @abstractmethod
    def param_dim(self) -> int:
        """Length of a valid parameter vector."""

    @property
    @abstractmethod
    def latent_space(self) -> LatentSpace:
        """Stable descriptor of the latent domain; identical on every call."""

    @property
    def capabilities(self) -> ModelCapabilities:
        return ModelCapabilities()

    @abstractmethod
    def log_joint(self, theta, w) -> float:
        """Log joint density of the fixed data and latent point ``w`` at ``theta``.

        Deterministic and pure: equal inputs give bit-identical outputs.
        Returns a finite float, or ``-inf`` as a degenerate (measure-zero)
        flag; never ``NaN`` or ``+inf``.
        """

    def log_joint_batch(self, theta, points) -> np.ndarray:
        """Vectorized :meth:`log_joint` over the rows of ``points``.

        The default implementation loops; subclasses override it with a
        closed-form vectorized path.  Same value contract as
        :meth:`log_joint`, elementwise.
        """
        theta = self.validate_theta(theta)
        pts = np.asarray(points)
        return np.array([self.log_joint(theta, p) for p in pts], dtype=float)

    def log_joint_fn(self, theta):
        """Bind ``theta`` once and return a fast ``w -> log_joint`` callable.

        Hot loops (chains) use this to avoid re-validating ``theta`` at
        every step.
        """
        theta = self.validate_theta(theta)
        return lambda w: self.log_joint(theta, w)

    def log_marginal_analytic(self, theta) -> float:
        """Closed-form log marginal likelihood, when the model has one.

        Only oracles and tests may rely on this; the comparison engine
        never calls it.
        """
        raise UnsupportedCapabilityError(
            f"{type(self).__name__} does not provide an analytic marginal"
        )

    def sample_posterior_exact(self, theta, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw ``n`` independent exact posterior latent points, shape (n, k)."""
        raise UnsupportedCapabilityError(
            f"{type(self).__name__} does not provide an exact posterior sampler"
        )

    def parameter_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-coordinate feasible box ``(lower, upper)``; infinite where free."""
        d = self.param_dim
        return np.full(d, -np.inf), np.full(d, np.inf)

    # -- validation helpers ------------------------------------------------

    def validate_theta(self, theta) -> np.ndarray:
        """Check and canonicalize a parameter vector, returning float64."""
        arr = np.asarray(theta, dtype=float)
        if arr.ndim != 1 or arr.shape[0] != self.param_dim:
            raise ContractViolationError(
                f"parameter vector must have length {self.param_dim}, "
                f"got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ContractViolationError("parameter vector entries must be finite")
        self._check_theta(arr)
        return arr

    def _check_theta(self, theta: np.ndarray) -> None:
        """Subclass hook for model-specific parameter constraints."""

    def validate_latent(self, w) -> np.ndarray:
        """Check one latent point against the latent space descriptor."""
        space = self.latent_space
        if space.is_discrete:
            arr = np.atleast_1d(np.asarray(w))
            if arr.ndim != 1 or arr.shape[0] != space.n_coords:
                raise ContractViolationError(
                    f"latent point must have {space.n_coords} coordinates"
                )
            if not np.issubdtype(arr.dtype, np.integer):
                as_int = arr.astype(np.int64)
                if not np.array_equal(as_int, arr):
                    raise ContractViolationError("discrete latent indices must be integers")
                arr = as_int
            cards = np.asarray(space.cardinalities)
            if np.any(arr < 0) or np.any(arr >= cards):
                raise ContractViolationError("discrete latent index out of range")
            return arr
        arr = np.atleast_1d(np.asarray(w, dtype=float))
        if arr.ndim != 1 or arr.shape[0] != space.n_coords:
            raise ContractViolationError(
                f"latent point must have {space.n_coords} coordinates"
            )
        if not np.all(np.isfinite(arr)):
            raise ContractViolationError("continuous latent coordinates must be finite")
        return arr
