"""Phase boundaries of a two-phase Navier-Stokes-Allen-Cahn fluid.

Submodules: ``thermo`` (energies, pressure, Gibbs potential), ``landscape``
(the reduced function Gamma and its critical points), ``maxwell`` (Maxwell
states and pi*), ``profile`` (no-flux profiles), ``twave`` (traveling waves),
``pde1d`` (finite-volume dynamics) and ``cli``.
"""

from .errors import (ConvergenceError, DomainError, MeasureError, NsacError, RangeError,
                     StateError, StructureError)
from .thermo import FluidState, ModelParams, NegLog, Polynomial, QuarticSymmetric

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError", "DomainError", "FluidState", "MeasureError", "ModelParams", "NegLog",
    "NsacError", "Polynomial", "QuarticSymmetric", "RangeError", "StateError", "StructureError",
]
