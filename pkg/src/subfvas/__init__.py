"""Sub-fractional Vasicek simulation and drift estimation."""

from .errors import (
    ArgumentError,
    ConfigError,
    DegenerateHorizonError,
    DomainError,
    ExperimentError,
    NonIdentifiableError,
    NumericalError,
    SubfvasError,
    UnsupportedParameterError,
)
from .grid import ProcessLabel, SamplePath, TimeGrid, VasicekParams
from .kernels import (
    HurstConstants,
    QuadratureSpec,
    cov_fbm,
    cov_subfbm,
    ek_integral_left,
    ek_integral_right,
    hurst_constants,
    kernel_k,
    kernel_n,
    prediction_weight,
    psi_transform,
    qvar_w,
)

__version__ = "0.1.0"

__all__ = [
    "ArgumentError",
    "ConfigError",
    "DegenerateHorizonError",
    "DomainError",
    "ExperimentError",
    "HurstConstants",
    "NonIdentifiableError",
    "NumericalError",
    "ProcessLabel",
    "QuadratureSpec",
    "SamplePath",
    "SubfvasError",
    "TimeGrid",
    "UnsupportedParameterError",
    "VasicekParams",
    "cov_fbm",
    "cov_subfbm",
    "ek_integral_left",
    "ek_integral_right",
    "hurst_constants",
    "kernel_k",
    "kernel_n",
    "prediction_weight",
    "psi_transform",
    "qvar_w",
]
