"""Simulation and growth-rate inference for jump-type CIR processes."""

__version__ = "0.1.0"

from .exceptions import (DegeneratePath, DomainError, EmptyInput, HypothesisViolation,  # noqa: E402
                         InvalidParameter, JumpCIRError, NotCritical, NotSubcritical,
                         NotSupercritical, OutOfHorizon, RegimeError, UnsupportedLevy)
from .model import (CompoundPoisson, Constant, Exponential, Gamma, ModelParams, Regime,  # noqa: E402
                    ZeroLevy, bajd, classify, levy_first_moment, mean_yt, stationary_mean)

__all__ = [
    "__version__",
    "CompoundPoisson", "Constant", "Exponential", "Gamma", "ModelParams", "Regime", "ZeroLevy",
    "bajd", "classify", "levy_first_moment", "mean_yt", "stationary_mean",
    "DegeneratePath", "DomainError", "EmptyInput", "HypothesisViolation", "InvalidParameter",
    "JumpCIRError", "NotCritical", "NotSubcritical", "NotSupercritical", "OutOfHorizon",
    "RegimeError", "UnsupportedLevy",
]
