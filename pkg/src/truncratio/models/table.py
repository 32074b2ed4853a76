"""Finite table model: a single observation with latent ``w`` in {0..K-1}.

The parameter vector *is* the table of joint values, one positive real
per latent index.  The marginal likelihood is just the table sum and the
posterior is the normalized table, so every quantity in the system can
be checked against two lines of arithmetic.  This is the reference
instance for oracle and estimator tests.
"""

from __future__ import annotations

import numpy as np

from ..errors import ContractViolationError
from .base import LatentSpace, LatentVariableModel, ModelCapabilities

__all__ = ["TableModel", "make_table_model"]


class TableModel(LatentVariableModel):
    """Joint density table over a K-point latent space.

    ``theta[w]`` is the joint value of the fixed observation and latent
    index ``w``.  Entries need not sum to one: the table sum is the
    marginal likelihood, not a probability.
    """

    def __init__(self, joint):
        table = np.asarray(joint, dtype=float)
        if table.ndim != 1 or table.size < 1:
            raise ContractViolationError("table must be a nonempty 1-D sequence")
        if not np.all(np.isfinite(table)) or np.any(table <= 0.0):
            raise ContractViolationError("table entries must be positive and finite")
        self._table = table
        self._table.flags.writeable = False
        self._space = LatentSpace.finite_discrete((table.size,))

    @property
    def table(self) -> np.ndarray:
        """The table the model was constructed with (its reference theta)."""
        return self._table

    @property
    def param_dim(self) -> int:
        return self._table.size

    @property
    def latent_space(self) -> LatentSpace:
        return self._space

    @property
    def capabilities(self) -> ModelCapabilities:
        return ModelCapabilities(has_analytic_marginal=True,
                                 has_exact_posterior_sampler=True)

    def _check_theta(self, theta: np.ndarray) -> None:
        # Zero entries are tolerated as degenerate flags; negatives never.
        if np.any(theta < 0.0):
            raise ContractViolationError("table entries must be nonnegative")
        if not np.any(theta > 0.0):
            raise ContractViolationError("table must have at least one positive entry")

    def log_joint(self, theta, w) -> float:
        theta = self.validate_theta(theta)
        w = self.validate_latent(w)
        with np.errstate(divide="ignore"):
            return float(np.log(theta[w[0]]))

    def log_joint_batch(self, theta, points) -> np.ndarray:
        theta = self.validate_theta(theta)
        pts = np.asarray(points)
        if pts.ndim == 1:
            pts = pts[:, None]
        with np.errstate(divide="ignore"):
            return np.log(theta)[pts[:, 0].astype(np.int64)]

    def log_marginal_analytic(self, theta) -> float:
        theta = self.validate_theta(theta)
        return float(np.log(theta.sum()))

    def posterior_probs(self, theta) -> np.ndarray:
        """Exact posterior over latent indices: the normalized table."""
        theta = self.validate_theta(theta)
        return theta / theta.sum()

    def sample_posterior_exact(self, theta, n: int, rng: np.random.Generator) -> np.ndarray:
        if n < 1:
            raise ContractViolationError("sample count must be positive")
        probs = self.posterior_probs(theta)
        draws = rng.choice(probs.size, size=int(n), p=probs)
        return draws.astype(np.int64)[:, None]


def make_table_model(joint) -> TableModel:
    """Build a :class:`TableModel` from a sequence of positive joint values."""
    return TableModel(joint)
