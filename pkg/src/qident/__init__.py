"""Exact arithmetic for graded product expansions.

Truncated Laurent series over the rationals, the modular expansions
built from them, Lorentzian lattice structures, Cartan-matrix machinery
with denominator and character checks, the twisted trace relations with
a coefficient solver, and floating-point slice evaluation, all behind
one command-line entry point.
"""

from .identities import verify_fmid, verify_j_product, verify_mid
from .moonshine import solve_coefficients, verify_twisted

__version__ = "0.1.0"

__all__ = [
    "verify_mid",
    "verify_fmid",
    "verify_j_product",
    "verify_twisted",
    "solve_coefficients",
    "__version__",
]
