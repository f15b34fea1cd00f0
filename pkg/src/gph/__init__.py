"""Conserved-quantity operators of the 1D cubic Gross-Pitaevskii hierarchy.

Build the recursive operators ``W_n^j`` symbolically, apply them to
factorized and finite de Finetti density matrices, and check conservation
along cubic NLS trajectories.
"""
from ._backend import kernels as _kernels
from .ladder import LadderReport, conserved_integral, ladder_report, w_sequence
from .operators import OperatorExpr, build_w, normalize, tensor
from .propagator import EvolveParams, evolve, gaussian_ic, soliton_ic
from .separable import Ensemble, apply_expr, product_state, trace, tr_w_ensemble
from .spectral import GridSpec, WaveField, make_grid
from .syntax import parse, pretty_print

BACKEND = _kernels.NAME

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Ensemble", "EvolveParams", "GridSpec", "LadderReport", "OperatorExpr", "WaveField",
    "apply_expr", "build_w", "conserved_integral", "evolve", "gaussian_ic", "ladder_report",
    "make_grid", "normalize", "parse", "pretty_print", "product_state", "soliton_ic", "tensor",
    "tr_w_ensemble", "trace", "w_sequence",
]
