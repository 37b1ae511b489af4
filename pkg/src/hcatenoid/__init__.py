"""Rotational surfaces whose mean curvature is prescribed by the angle function.

The package integrates catenoid-type profile curves for prescriptions on
[-1, 1], classifies the growth of their ends, checks comparison properties
between ordered pairs of prescriptions, and emits half-space exclusion
certificates for prescriptions on the sphere.
"""

from .errors import (BranchRangeError, DomainError, IntegrationError,
                     ParseError, PreconditionError)
from .prescribed import (ClassMembership, EquivalenceReport, PowerLawOrder,
                         PrescribedFunction, check_admissible, from_expression,
                         from_table, limit_ratio, minimal, polynomial,
                         power_law, scaled, vanishing_order)
from .profile import (Catenoid, CurvatureSample, IntegratorConfig,
                      ProfileState, SurfaceMesh, TERM_STEP_FAILURE,
                      TERM_TURNING, TERM_XMAX, curvature_at,
                      export_mesh_obj, export_profile_csv, graph_residual,
                      height_at, integrate_catenoid, mesh, residual, scale,
                      slope_at)
from .asymptotics import (EndClassification, EnvelopeReport, GrowthFit,
                          TailIntegral, classification_to_dict, classify_end,
                          estimate_c0, growth_envelope, minimal_bound_margins,
                          tail_integral)
from .comparison import (ComparisonReport, CoverConvergence,
                         NecksizeUniformity, TransferReport,
                         behavior_across_necksizes, compare_derivatives,
                         compare_heights, comparison_to_dict,
                         double_cover_convergence, equivalence_behavior)
from .halfspace import (HalfSpaceCertificate, LimitConstant, Minorant,
                        MinorantFit, SphereFunction, certificate_to_dict,
                        certify, fit_minorant, hemisphere_grid,
                        minorant_margin, verify_certificate)

__version__ = "0.1.0"

__all__ = [
    "BranchRangeError", "DomainError", "IntegrationError", "ParseError",
    "PreconditionError",
    "ClassMembership", "EquivalenceReport", "PowerLawOrder",
    "PrescribedFunction", "check_admissible", "from_expression", "from_table",
    "limit_ratio", "minimal", "polynomial", "power_law", "scaled",
    "vanishing_order",
    "Catenoid", "CurvatureSample", "IntegratorConfig", "ProfileState",
    "SurfaceMesh", "TERM_STEP_FAILURE", "TERM_TURNING", "TERM_XMAX",
    "curvature_at", "export_mesh_obj", "export_profile_csv", "graph_residual",
    "height_at", "integrate_catenoid", "mesh", "residual", "scale", "slope_at",
    "EndClassification", "EnvelopeReport", "GrowthFit", "TailIntegral",
    "classification_to_dict", "classify_end", "estimate_c0", "growth_envelope",
    "minimal_bound_margins", "tail_integral",
    "ComparisonReport", "CoverConvergence", "NecksizeUniformity",
    "TransferReport", "behavior_across_necksizes", "compare_derivatives",
    "compare_heights", "comparison_to_dict", "double_cover_convergence",
    "equivalence_behavior",
    "HalfSpaceCertificate", "LimitConstant", "Minorant", "MinorantFit",
    "SphereFunction", "certificate_to_dict", "certify", "fit_minorant",
    "hemisphere_grid", "minorant_margin", "verify_certificate",
]
