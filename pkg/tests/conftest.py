"""Shared stub models and helpers for the test suite."""

import numpy as np
import pytest

from truncratio.models.base import LatentSpace, LatentVariableModel, ModelCapabilities


class StubContinuousModel(LatentVariableModel):
    """1-D continuous-latent model with an injectable log density."""

    def __init__(self, logp, dim=1, param_dim=1):
        self._logp = logp
        self._space = LatentSpace.continuous(dim)
        self._param_dim = param_dim

    @property
    def param_dim(self):
        return self._param_dim

    @property
    def latent_space(self):
        return self._space

    def log_joint(self, theta, w):
        w = self.validate_latent(w)
        return float(self._logp(w))


def flat_target_model():
    """Constant log joint: every proposal is accepted."""
    return StubContinuousModel(lambda w: 0.0)


def gaussian_target_model(mean=0.0, sd=1.0):
    return StubContinuousModel(
        lambda w: -0.5 * ((w[0] - mean) / sd) ** 2
    )


def neg_inf_at_origin_model():
    return StubContinuousModel(
        lambda w: -np.inf if np.all(w == 0.0) else 0.0
    )


def point_support_model():
    """Finite density only at the origin: chains can never move."""
    return StubContinuousModel(
        lambda w: 0.0 if np.all(w == 0.0) else -np.inf
    )


@pytest.fixture
def table_pair():
    """The hand-checkable reference pair: L1=0.5 < L2=0.7, M=0.5."""
    from truncratio import make_table_model

    model = make_table_model([0.2, 0.3])
    return model, np.array([0.2, 0.3]), np.array([0.4, 0.3])


def conjugate_posterior_moments(data, mu, tau, sigma):
    """Closed-form posterior mean/variance of the shared random effect.

    Independent of the package code: straight conjugate-normal algebra,
    used as the oracle for chain-correctness tests.
    """
    data = np.asarray(data, dtype=float)
    m = data.size
    resid_sum = float((data - mu).sum())
    denom = sigma ** 2 + m * tau ** 2
    post_mean = tau ** 2 * resid_sum / denom
    post_var = tau ** 2 * sigma ** 2 / denom
    return post_mean, post_var
