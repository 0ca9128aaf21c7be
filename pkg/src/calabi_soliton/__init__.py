"""Radial Kahler-Ricci and scalar solitons from the Calabi ansatz.

The functional core lives in the submodules (``sasaki``, ``profile``,
``mu_solver``, ``radial``, ``classify``, ``flow``, ``scalar``,
``fullmetric``); ``estimators`` wraps it in scikit-learn style classes.
"""

__version__ = "0.1.0"

from .errors import ConvergenceError, DegenerateSolitonError, InvalidParameterError, VerificationError
from .mu_solver import MuRootCertificate, f_eval, solve_mu
from .profile import SolitonProfile, nu_boundary, nu_zero, ode_residual, phi_closed, phi_prime
from .radial import RadialSolution, integrate_sigma
from .sasaki import ConeAperture, EtaEinsteinStructure, LineBundleData, d_homothety, make_eta_einstein
from .scalar import ScalarSolitonProfile, phi_scalar

__all__ = [
    "__version__",
    "ConeAperture",
    "ConvergenceError",
    "DegenerateSolitonError",
    "EtaEinsteinStructure",
    "InvalidParameterError",
    "LineBundleData",
    "MuRootCertificate",
    "RadialSolution",
    "ScalarSolitonProfile",
    "SolitonProfile",
    "VerificationError",
    "d_homothety",
    "f_eval",
    "integrate_sigma",
    "make_eta_einstein",
    "nu_boundary",
    "nu_zero",
    "ode_residual",
    "phi_closed",
    "phi_prime",
    "phi_scalar",
    "solve_mu",
]
