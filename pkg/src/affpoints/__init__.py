"""Affine invariant points of convex bodies and the symmetry they measure."""

from .bodies import (
    AffineImage,
    AffineMap,
    Ball,
    BodyError,
    Chord,
    ConvexBody,
    CrossSectionHull,
    Ellipsoid,
    EllipsoidBody,
    PolarBody,
    VPolytope,
    affine_image,
    chord_through,
    hausdorff_distance,
    membership,
    polar,
    support_function,
)
from .bodyjson import BodyJSONError, body_to_json, parse_body
from .config import CONFIG, RunConfig
from .ellipsoids import (
    ContactInfeasibleError,
    ContactSystem,
    EllipsoidResult,
    KERNEL_BACKEND,
    SolverError,
    john,
    john_position_transform,
    kernel_info,
    loewner,
    mvee_points,
    solve_contact_weights,
    verify_contact_system,
)
from .families import (
    FamilyError,
    FamilyParams,
    body_C,
    body_K,
    completed_simplex,
    cone_body,
    contact_system_K,
    epsilon_d,
    family_params,
    frustum_body,
    frustum_centroid_coordinate,
    phi_jl_Cd_closed_form,
    regular_simplex,
    rho_d,
    shifted_crosspolytope_polar,
)
from .measures import (
    DualZeroReport,
    MeasureError,
    SymmetryMeasureResult,
    check_lower_bound_jl,
    dual_zero_search,
    phi_measure,
    point_distance_estimate,
    random_sandwich_body,
)
from .points import (
    CENTROID,
    JOHN,
    LOEWNER,
    POINT_MAPS,
    SANTALO,
    GaugeValue,
    PointError,
    PointMap,
    affine_combination,
    boundary_push,
    centroid,
    centroid_is_exact,
    equivariance_check,
    gauge_ratio,
    john_point,
    loewner_point,
    point_map,
    polar_volume,
    psi,
    santalo,
)
from .symmetry import (
    FixedSpace,
    SymmetryError,
    SymmetryGroup,
    affinely_equivalent,
    axis_signed_permutations,
    fixed_space,
    group_average,
    symmetry_group,
    verify_symmetry,
)

__version__ = "0.1.0"
