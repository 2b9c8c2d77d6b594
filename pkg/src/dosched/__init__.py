"""Outage and transmission capacity of distributed opportunistic scheduling
in Poisson ad hoc networks: analytic bounds, density solvers and a Monte
Carlo simulator used to check them."""

__version__ = "0.1.0"

from .config import (
    ConstantDistance,
    DiscreteDistance,
    NetworkConfig,
    SchedulerKind,
    Scheme,
    ThresholdPolicy,
    UniformDistance,
)
from .errors import (
    ContractError,
    DegenerateConfigError,
    DoschedError,
    NoNeighborError,
    NumericError,
    ParameterError,
    SpecValidationError,
)
from .kernels import BACKEND
from .montecarlo import McEstimate, McSettings
from .solvers import solve_active_density

__all__ = [
    "__version__",
    "BACKEND",
    "ConstantDistance",
    "DiscreteDistance",
    "UniformDistance",
    "NetworkConfig",
    "SchedulerKind",
    "Scheme",
    "ThresholdPolicy",
    "McEstimate",
    "McSettings",
    "solve_active_density",
    "DoschedError",
    "ParameterError",
    "NumericError",
    "ContractError",
    "NoNeighborError",
    "DegenerateConfigError",
    "SpecValidationError",
]
