"""Symplectic kernel prediction of Hamiltonian dynamics over macro time steps."""

from .kernels import FAMILIES, KernelSpec
from .predictor import PredictorModel, predict_step, rollout
from .surrogate import DerivFunctional, HBDataset, Surrogate, fit

__all__ = [
    "FAMILIES",
    "KernelSpec",
    "PredictorModel",
    "predict_step",
    "rollout",
    "DerivFunctional",
    "HBDataset",
    "Surrogate",
    "fit",
]

__version__ = "0.1.0"
