"""Discretized loop-space geometry: transgression, holonomy and prequantization."""

from .loops import SampledLoop, clenshaw_curtis, open_path
from .surfaces import TriangulatedSurface, icosphere, polar_disc
from .transgression import (boundary_term, d_transgression, deform_derivative, lie_transgression,
                            transgress_d, transgress_form, transgress_lie)
from .holonomy import (dbrane_holonomy, line_holonomy, line_holonomy_patches, path_ordered,
                       surface_holonomy, transgress_section_wilson, wilson_loop)
from .functionals import LoopFunctional
from .ks import (hamiltonian_naturality, holonomy_variation, ks_apply, ks_commutator_residual,
                 ks_operator, loop_curvature, section_covariant_derivative, transgressed_connection)

__all__ = ["SampledLoop", "clenshaw_curtis", "open_path", "TriangulatedSurface", "icosphere",
           "polar_disc", "boundary_term", "d_transgression", "deform_derivative",
           "lie_transgression", "transgress_d", "transgress_form", "transgress_lie",
           "dbrane_holonomy", "line_holonomy", "line_holonomy_patches", "path_ordered",
           "surface_holonomy", "transgress_section_wilson", "wilson_loop", "LoopFunctional",
           "hamiltonian_naturality", "holonomy_variation", "ks_apply", "ks_commutator_residual",
           "ks_operator", "loop_curvature", "section_covariant_derivative",
           "transgressed_connection"]
