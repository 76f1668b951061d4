"""Self-consistent level dressing, internal dynamics and force components."""

from .dressing import DressingError, LevelDressing, NoRootError, solve_dressing, widths_only
from .forces import ForceBreakdown, ForceComponents, force_breakdown, force_components, total_force
from .master import (DensityMatrixState, density_matrix_series, evolve, evolve_coherences,
                     evolve_populations, rate_matrix)
from .short_distance import (closed_form_force, closed_form_width, one_pass_dressing,
                             short_distance_dressing, short_distance_force, short_distance_kernel)

__all__ = [
    "DressingError",
    "NoRootError",
    "LevelDressing",
    "solve_dressing",
    "widths_only",
    "ForceBreakdown",
    "ForceComponents",
    "force_breakdown",
    "force_components",
    "total_force",
    "DensityMatrixState",
    "density_matrix_series",
    "evolve",
    "evolve_coherences",
    "evolve_populations",
    "rate_matrix",
    "closed_form_force",
    "closed_form_width",
    "one_pass_dressing",
    "short_distance_dressing",
    "short_distance_force",
    "short_distance_kernel",
]
