"""Nonlocality of a single-photon entangled state under Gaussian-assisted
on-off and binned homodyne measurements.

Modules: :mod:`~spqn.fock` (truncated Fock operators),
:mod:`~spqn.measurement` (2x2 local observables), :mod:`~spqn.scenario`
(measurement catalog and CHSH value), :mod:`~spqn.optimizer`,
:mod:`~spqn.robustness`, :mod:`~spqn.estimator` and :mod:`~spqn.cli`.
"""

from .exceptions import (
    ConvergenceError,
    InvalidDimensionError,
    InvalidIntervalError,
    InvalidParameterError,
    NoViolationError,
    NumericInputError,
    SpqnError,
)
from .estimator import ChshMaximizer
from .fock import GaussianParams, displacement_matrix, gaussian_unitary, squeezing_matrix
from .measurement import (
    HomodyneParams,
    LocalObservable,
    OnOffParams,
    gaussian_homodyne_remap,
    homodyne_observable,
    onoff_observable,
    squeezing_db,
)
from .optimizer import OptimizationResult, OptimizerConfig, optimize_scenario
from .robustness import SweepGrid, Threshold, find_threshold, sweep
from .scenario import Scenario, get_scenario, scenario_evaluate, source_state

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError", "InvalidDimensionError", "InvalidIntervalError", "InvalidParameterError",
    "NoViolationError", "NumericInputError", "SpqnError",
    "GaussianParams", "displacement_matrix", "gaussian_unitary", "squeezing_matrix",
    "HomodyneParams", "LocalObservable", "OnOffParams", "gaussian_homodyne_remap",
    "homodyne_observable", "onoff_observable", "squeezing_db",
    "ChshMaximizer",
    "OptimizationResult", "OptimizerConfig", "optimize_scenario",
    "SweepGrid", "Threshold", "find_threshold", "sweep",
    "Scenario", "get_scenario", "scenario_evaluate", "source_state",
]
