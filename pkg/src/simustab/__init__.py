"""Simultaneous stabilization of a linear plant family by analytic interpolation."""
from .cee import (CEEProblem, Interpolant, build_data_operator, build_structure, check_solution,
                  eval_F, solve_cee, solve_interpolation)
from .errors import InfeasibilityError, NumericalError, SimustabError
from .pipeline import PipelineResult, run_pipeline
from .ratmat import Polynomial, RationalFunction, RationalMatrix
from .stabdata import PlantPair, build_pencil, unstable_zeros
from .synth import compensator, delta_pair, sweep, verify_bezout

__all__ = [
    "CEEProblem", "Interpolant", "build_data_operator", "build_structure", "check_solution",
    "eval_F", "solve_cee", "solve_interpolation",
    "InfeasibilityError", "NumericalError", "SimustabError",
    "PipelineResult", "run_pipeline",
    "Polynomial", "RationalFunction", "RationalMatrix",
    "PlantPair", "build_pencil", "unstable_zeros",
    "compensator", "delta_pair", "sweep", "verify_bezout",
]
