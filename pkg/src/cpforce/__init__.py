"""Van der Waals potentials and Casimir-Polder forces on multilevel atoms near a
Drude-Lorentz magnetodielectric half-space (reduced units hbar = c = eps0 = 1)."""

from .atom import (AtomModel, dipole_from_gamma0, polarizability_generalized,
                   polarizability_lowest_order, two_level_atom)
from .green import (GreenEval, HalfSpace, PolePathError, fresnel_rs_rp, scattering_green_coincident,
                    scattering_green_curl, scattering_green_gradient, scattering_green_two_point,
                    vacuum_im_green_coincident)
from .materials import VACUUM, DrudeLorentzParams, MaterialModel, PoleError, eval_epsilon, eval_mu
from .perturbative import (VdwResult, cp_force_perturbative, ground_state_vdw_halfspace,
                           vdw_off_resonant, vdw_potential, vdw_resonant)
from .quadrature import (DEFAULT_SPEC, ConvergenceError, QuadratureSpec, integrate_adaptive,
                         integrate_semi_infinite)

__version__ = "0.1.0"

__all__ = [
    "AtomModel", "dipole_from_gamma0", "polarizability_generalized", "polarizability_lowest_order",
    "two_level_atom", "GreenEval", "HalfSpace", "PolePathError", "fresnel_rs_rp",
    "scattering_green_coincident", "scattering_green_curl", "scattering_green_gradient",
    "scattering_green_two_point", "vacuum_im_green_coincident", "VACUUM", "DrudeLorentzParams",
    "MaterialModel", "PoleError", "eval_epsilon", "eval_mu", "VdwResult", "cp_force_perturbative",
    "ground_state_vdw_halfspace", "vdw_off_resonant", "vdw_potential", "vdw_resonant",
    "DEFAULT_SPEC", "ConvergenceError", "QuadratureSpec", "integrate_adaptive",
    "integrate_semi_infinite",
]
