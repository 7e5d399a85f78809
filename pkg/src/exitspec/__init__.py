"""Exit-time moment spectra on constant-curvature model surfaces.

The package computes L1 moment hierarchies of the Dirichlet exit time on
geodesic balls (radial solver) and on masked grid domains over flat tori and
round spheres (sparse solver), recovers Dirichlet spectra from moment
sequences, and runs symmetrization comparison checks: moment-ratio
domination, pointwise PDE domination, Cheeger-type and Faber-Krahn-type
bounds, each with an explicit numerical error budget.
"""

from .comparison import (
    CheegerReport,
    ComparisonReport,
    FaberKrahnReport,
    PdeComparisonReport,
    cheeger_bound_check,
    comparison_sphere,
    faber_krahn_check,
    moment_comparison_report,
    pde_comparison_check,
    symmetrized_ball,
)
from .errors import ComparisonFailure, ConvergenceError, ExitspecError, InputError
from .grid_solver import (
    CapMask,
    EigenResult,
    FlatTorus,
    GridDomain,
    MaskDifference,
    MaskUnion,
    RectMask,
    RoundSphere,
    build_domain,
    dirichlet_eigenpairs,
    moment_hierarchy_grid,
    poisson_solve,
    read_mask_file,
    weighted_sample,
    write_mask_file,
)
from .iso_radius import RicciBoundInput, comparison_radius, isoperimetric_constant
from .model_space import (
    GeodesicBall,
    ModelSpace,
    cap_radius_for_volume,
    geodesic_ball_volume,
    geodesic_sphere_area,
)
from .radial_solver import (
    MomentSequence,
    moment_hierarchy_ball,
    pointwise_moment,
    radial_grid,
    radial_poisson_solve,
)
from .rearrange import (
    RadialField,
    WeightedSample,
    decreasing_rearrangement,
    distribution_function,
    lp_mean,
    quantization_gap,
    spherical_symmetrization,
)
from .spectral import (
    EigenBoundReport,
    RecoveryResult,
    SpectralData,
    eigenvalue_bound,
    heat_content,
    moments_from_spectrum,
    recover_spectrum,
    volume_partition_defect,
)

__version__ = "0.1.0"

__all__ = [
    "CapMask",
    "CheegerReport",
    "ComparisonFailure",
    "ComparisonReport",
    "ConvergenceError",
    "EigenBoundReport",
    "EigenResult",
    "ExitspecError",
    "FaberKrahnReport",
    "FlatTorus",
    "GeodesicBall",
    "GridDomain",
    "InputError",
    "MaskDifference",
    "MaskUnion",
    "ModelSpace",
    "MomentSequence",
    "PdeComparisonReport",
    "RadialField",
    "RecoveryResult",
    "RectMask",
    "RicciBoundInput",
    "RoundSphere",
    "SpectralData",
    "WeightedSample",
    "build_domain",
    "cap_radius_for_volume",
    "cheeger_bound_check",
    "comparison_radius",
    "comparison_sphere",
    "decreasing_rearrangement",
    "dirichlet_eigenpairs",
    "distribution_function",
    "eigenvalue_bound",
    "faber_krahn_check",
    "geodesic_ball_volume",
    "geodesic_sphere_area",
    "heat_content",
    "isoperimetric_constant",
    "lp_mean",
    "moment_comparison_report",
    "moment_hierarchy_ball",
    "moment_hierarchy_grid",
    "moments_from_spectrum",
    "pde_comparison_check",
    "pointwise_moment",
    "poisson_solve",
    "quantization_gap",
    "radial_grid",
    "radial_poisson_solve",
    "read_mask_file",
    "recover_spectrum",
    "spherical_symmetrization",
    "symmetrized_ball",
    "volume_partition_defect",
    "weighted_sample",
    "write_mask_file",
]
