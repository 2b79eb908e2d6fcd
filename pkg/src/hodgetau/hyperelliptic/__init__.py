"""Genus-2 hyperelliptic curves: periods, Abel map, prime form and the tau function."""

from .curve import (
    CurveInputError,
    CurvePoint,
    DegenerateStratumError,
    DifferentialSpec,
    HyperellipticCurve,
    dump_curve_json,
    load_curve_json,
    zeros_of_differential,
)
from .periods import PeriodData, abel_map, period_data, riemann_constants
from .primeform import prime_form
from .tau import TauEvaluation, TauEvaluationError, tau0_eval

__all__ = [
    "CurveInputError", "CurvePoint", "DegenerateStratumError", "DifferentialSpec", "HyperellipticCurve",
    "PeriodData", "TauEvaluation", "TauEvaluationError", "abel_map", "dump_curve_json", "load_curve_json",
    "period_data", "prime_form", "riemann_constants", "tau0_eval", "zeros_of_differential",
]
