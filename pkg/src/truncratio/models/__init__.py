"""Latent-variable model abstraction and the built-in test models."""

from .base import LatentSpace, LatentVariableModel, ModelCapabilities
from .mixture import (
    GaussianMixtureModel,
    em_step,
    make_gaussian_mixture,
    simulate_mixture_data,
)
from .random_effects import (
    RandomEffectsModel,
    make_random_effects,
    simulate_random_effects_data,
)
from .table import TableModel, make_table_model

__all__ = [
    "LatentSpace",
    "LatentVariableModel",
    "ModelCapabilities",
    "TableModel",
    "make_table_model",
    "GaussianMixtureModel",
    "make_gaussian_mixture",
    "em_step",
    "simulate_mixture_data",
    "RandomEffectsModel",
    "make_random_effects",
    "simulate_random_effects_data",
]
