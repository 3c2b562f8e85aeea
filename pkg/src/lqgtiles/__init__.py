"""Dyadic-square tilings of Liouville quantum gravity.

Simulator and measurement toolkit for the mass-threshold subdivision of
the unit square driven by a log-correlated Gaussian field: tiling
construction, square-adjacency graph metrics (distances, ball growth),
and fractal counting exponents across the full range of background
charge Q > 0 (matter central charge c_M < 25).
"""
__version__ = "0.1.0"

from .errors import (CapacityError, ConfigError, DomainError, LqgError,
                     NumericError)
from .experiment import (FieldSpec, Ladder, guess_dimension,
                         kpz_exponent_prediction, run_ball_growth, run_kpz,
                         run_measure, run_ptp_distance, watabiki_dimension)
from .field import (ConstantField, ExactField, LogSingularityField,
                    OctaveConfig, OctaveField)
from .fractal import FractalSet, quantum_count
from .graph import AdjacencyGraph
from .params import Params, params_from_cm, params_from_q
from .squares import UNIT_SQUARE, DyadicSquare
from .tiling import Tiling, mass, subdivide

__all__ = [
    "__version__",
    "LqgError", "DomainError", "ConfigError", "NumericError", "CapacityError",
    "Params", "params_from_cm", "params_from_q",
    "DyadicSquare", "UNIT_SQUARE",
    "ConstantField", "ExactField", "LogSingularityField",
    "OctaveConfig", "OctaveField",
    "FractalSet", "quantum_count",
    "Tiling", "mass", "subdivide",
    "AdjacencyGraph",
    "Ladder", "FieldSpec", "kpz_exponent_prediction", "watabiki_dimension",
    "guess_dimension", "run_kpz", "run_measure", "run_ball_growth",
    "run_ptp_distance",
]
