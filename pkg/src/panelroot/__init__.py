"""Largest-eigenvalue unit-root test for high-dimensional random-walk panels."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .dgp import LagModel, NoisePlan, Panel, UnitRootScenario, generate_errors, generate_panel
from .errors import (
    ConvergenceError,
    DegenerateRowError,
    NumericalError,
    PanelRootError,
    ValidationError,
)
from .limitlaw import LimitMoments, default_moments, estimate_moments, load_moments, sample_limit
from .randomness import NoiseDistribution, RngStream
from .spectra import build_basis, sample_correlation, symmetric_eigen, top_eigen_T_form
from .urtest import TestResult, decide, run_test

__all__ = [
    "BACKEND",
    "ConvergenceError",
    "DegenerateRowError",
    "LagModel",
    "LimitMoments",
    "NoiseDistribution",
    "NoisePlan",
    "NumericalError",
    "Panel",
    "PanelRootError",
    "RngStream",
    "TestResult",
    "UnitRootScenario",
    "ValidationError",
    "build_basis",
    "decide",
    "default_moments",
    "estimate_moments",
    "generate_errors",
    "generate_panel",
    "load_moments",
    "run_test",
    "sample_correlation",
    "sample_limit",
    "symmetric_eigen",
    "top_eigen_T_form",
]
