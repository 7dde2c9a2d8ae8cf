"""Spectral homogenization laboratory for hinged plates with oscillating edges.

Bicubic Hermite finite elements for ``Delta^2 u + u = lambda u`` on
``(0, L) x (-1, 0)`` and on its perturbations with top boundary
``x_N = eps^alpha b(x / eps)``, the three limit problems, the periodic cell
problem that produces the boundary coefficient ``gamma``, one-dimensional
reference spectra and the anisotropic unfolding operator.
"""
from .assembly import FormPencil, assemble_limit, assemble_perturbed
from .cell import CellSolution, gamma_energy, gamma_flux, solve_cell, solve_cell_truncated
from .config import ExperimentConfig
from .eigensolve import EigenResult, smallest_eigenpairs
from .errors import InvalidArgument, NumericalFailure, OscPlateError, OutOfDomain
from .geometry import (DomainSpec, Regime, RegimeReport, classify_regime, h_eps,
                       invert_phi, jacobian_det, phi_eps)
from .oracle1d import ModeProblem, limit_spectrum, mode_eigenvalues, spectrum_values
from .plate_fem import (DirichletOnW, Grid, Intermediate, PlateField, StrangeTerm,
                        build_dofmap, interpolate)
from .profile import Profile, fourier
from .unfolding import (UnfoldedField, boundary_layer_error, check_exact_integration,
                        pulled_back, unfold)

__version__ = "0.1.0"

__all__ = [
    "CellSolution", "DirichletOnW", "DomainSpec", "EigenResult", "ExperimentConfig",
    "FormPencil", "Grid", "Intermediate", "InvalidArgument", "ModeProblem",
    "NumericalFailure", "OscPlateError", "OutOfDomain", "PlateField", "Profile",
    "Regime", "RegimeReport", "StrangeTerm", "UnfoldedField", "assemble_limit",
    "assemble_perturbed", "boundary_layer_error", "build_dofmap",
    "check_exact_integration", "classify_regime", "fourier", "gamma_energy",
    "gamma_flux", "h_eps", "interpolate", "invert_phi", "jacobian_det",
    "limit_spectrum", "mode_eigenvalues", "phi_eps", "pulled_back",
    "smallest_eigenpairs", "solve_cell", "solve_cell_truncated", "spectrum_values",
    "unfold",
]
