"""Jost solutions and spectra of Jacobi operators with rapidly growing coefficients."""

from .coeffs import (
    Cell,
    Classification,
    CoefficientModel,
    Variant,
    classify,
    load_model,
    model_from_config,
    powerlaw,
)
from .errors import (
    ConfigError,
    DomainError,
    HorizonError,
    JostError,
    RangeError,
    UnresolvedSpectrumError,
    UnsupportedError,
    VerificationError,
)
from .kernels import BACKEND
from .recurrence import SolutionSeq, backward_solution, forward_polynomials, wronskian
from .scalednum import PrecisionPolicy, ScaledComplex, working_precision

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Cell",
    "Classification",
    "CoefficientModel",
    "ConfigError",
    "DomainError",
    "HorizonError",
    "JostError",
    "PrecisionPolicy",
    "RangeError",
    "ScaledComplex",
    "SolutionSeq",
    "UnresolvedSpectrumError",
    "UnsupportedError",
    "Variant",
    "VerificationError",
    "__version__",
    "backward_solution",
    "classify",
    "forward_polynomials",
    "load_model",
    "model_from_config",
    "powerlaw",
    "working_precision",
    "wronskian",
]
