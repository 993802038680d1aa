"""Sub-Riemannian analysis of three Brownian motions and their Levy areas.

Subpackages: :mod:`threebm.algebra` (exact calculus), :mod:`threebm.radial`
(reduction to ``(r1, r2, z)``), :mod:`threebm.kernel` (heat kernel),
:mod:`threebm.verify` (inequality audits). Modules: :mod:`threebm.sampler`,
:mod:`threebm.geodesy`, :mod:`threebm.cli`.
"""
from .errors import DegenerateError, FitFailure, NonConvergenceError, UnderflowError

__version__ = "0.1.0"
__all__ = ["DegenerateError", "FitFailure", "NonConvergenceError", "UnderflowError", "__version__"]
