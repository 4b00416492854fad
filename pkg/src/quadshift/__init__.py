"""Time-dependent quadratic Hamiltonians in one dimension.

Propagates wave packets under H = a p^2/2 + b (px + xp)/2 + c x^2/2 + f p + g x
and checks that the linear terms f, g act only through a classical shift
and a phase.
"""
from .classical import ShiftState, integrate_shift, integrate_trajectory
from .errors import ConfigError, QuadShiftError
from .kernels import BACKEND
from .model import (
    CoefficientFunction,
    CoefficientSet,
    GaussianPacketSpec,
    Grid,
    PhysicalParams,
    WaveFunction,
    make_packet,
    strip_linear,
)
from .moments import MomentState, evolve_second_moments, extract_moments
from .propagator import build_generator, cn_step, evolve, evolve_pair, expm_step
from .scenario import Scenario, load_config, parse_config
from .transform import apply_linear_shift, apply_momentum_shift, theorem_residual, to_momentum, to_position

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CoefficientFunction",
    "CoefficientSet",
    "ConfigError",
    "GaussianPacketSpec",
    "Grid",
    "MomentState",
    "PhysicalParams",
    "QuadShiftError",
    "Scenario",
    "ShiftState",
    "WaveFunction",
    "apply_linear_shift",
    "apply_momentum_shift",
    "build_generator",
    "cn_step",
    "evolve",
    "evolve_pair",
    "evolve_second_moments",
    "expm_step",
    "extract_moments",
    "integrate_shift",
    "integrate_trajectory",
    "load_config",
    "make_packet",
    "parse_config",
    "strip_linear",
    "theorem_residual",
    "to_momentum",
    "to_position",
]
