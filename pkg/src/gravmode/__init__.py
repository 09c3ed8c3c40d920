"""Quantifies how much quantum coherence a harmonic vibration mode loses
to a gravitationally coupled virtual clone of itself.

Library layout:
  core         -- dimensionless parameterization (Planck units, hbar = 1)
  specfun      -- oscillator eigenfunctions, scaled Bessel K0, quadrature
  coupling     -- clone-interaction potential and its Fock matrix elements
  perturbation -- first-order ground state, reduced state, purity/fidelity
  oracle       -- exact-diagonalization cross-check
  cli          -- point / figure / verify / selfcheck commands
"""
from .core import ModeParams, TruncationSpec, make_params
from .specfun import (
    QuadratureError,
    QuadratureSpec,
    bessel_k0_scaled,
    hermite_function,
    integrate_1d,
    integrate_2d,
    phi_n,
)
from .coupling import (
    RotatedBasisMap,
    gamma_element,
    gamma_element_reduced,
    mean_potential_closed_form,
    potential,
    potential_matrix,
)
from .perturbation import (
    Deficits,
    DensityMatrix,
    GammaMatrix,
    ModeReport,
    build_gamma,
    deficits,
    fidelity,
    ground_state_energy,
    mode_report,
    purity,
    reduce_density,
)
from .oracle import (
    ComparisonReport,
    ExactGroundState,
    assemble_hamiltonian,
    compare,
    exact_ground_state,
    exact_reduced_report,
)

__version__ = "0.1.0"

__all__ = [
    "ModeParams", "TruncationSpec", "make_params",
    "QuadratureError", "QuadratureSpec", "bessel_k0_scaled",
    "hermite_function", "integrate_1d", "integrate_2d", "phi_n",
    "RotatedBasisMap", "gamma_element", "gamma_element_reduced",
    "mean_potential_closed_form", "potential", "potential_matrix",
    "Deficits", "DensityMatrix", "GammaMatrix", "ModeReport",
    "build_gamma", "deficits", "fidelity", "ground_state_energy",
    "mode_report", "purity", "reduce_density",
    "ComparisonReport", "ExactGroundState", "assemble_hamiltonian",
    "compare", "exact_ground_state", "exact_reduced_report",
    "__version__",
]
