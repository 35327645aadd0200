"""Ground-state energies of one-dimensional polynomial potentials.

EPPS first-order perturbation theory on an exponential-polynomial trial state,
with a Rayleigh-Ritz harmonic-oscillator benchmark alongside.
"""

from .ansatz import AnsatzConfig, AnsatzSolution, AnsatzSolveError, solve
from .polynomial import Parity, Polynomial, PolynomialParseError, parse_potential
from .quadrature import PerturbationResult, QuadratureConfig, QuadratureError, first_order_correction
from .ritz import RitzConfig, RitzError, RitzResult, converge_ground_state

__all__ = [
    "AnsatzConfig",
    "AnsatzSolution",
    "AnsatzSolveError",
    "Parity",
    "PerturbationResult",
    "Polynomial",
    "PolynomialParseError",
    "QuadratureConfig",
    "QuadratureError",
    "RitzConfig",
    "RitzError",
    "RitzResult",
    "converge_ground_state",
    "first_order_correction",
    "parse_potential",
    "solve",
]

__version__ = "0.1.0"
