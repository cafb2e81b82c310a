"""Isoperimetric profiles of spheres, spherical cylinders and products
M^m x R^n, certified lower bounds for them, and the Yamabe-constant bounds
those comparisons imply."""

from .bounds import (
    PiecewiseBound,
    PowerLawBound,
    Product,
    ScaledReferenceBound,
    TubeBound,
    backward_extension,
    combine_pointwise,
    forward_extension,
    imported_inequalities,
    product_bound,
    tube_bound,
)
from .profiles import (
    CylinderBallFamily,
    ProfileFn,
    SphereGeometry,
    TubeFunction,
    cylinder_family,
    cylinder_profile,
    euclidean_profile,
    scale_profile,
    sphere_ball,
    sphere_profile,
    tube_function,
)
from .special import DomainError, euclidean_constant, sphere_volume
from .verify import (
    VerificationReport,
    check_monotone,
    check_renormalized_concavity,
    dominates,
    figure_data,
)
from .yamabe import YamabeEstimate, yamabe_reports, yamabe_ratio, yamabe_sphere

__version__ = "0.1.0"
