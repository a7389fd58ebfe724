"""Heisenberg group geometry and its Sasaki tangent bundle.

Core layout:

- ``heisenberg``: the base manifold (metric, frame, connection, curvature,
  closed-form geodesics, covariant differentiation along curves)
- ``bundle``: the tangent bundle with the Sasaki metric (lifts, geodesic
  flow, Lagrangian, first-integral residuals, reduced fiber system)
- ``distributions``: totally-geodesic / isocline certification
- ``integrate``: fixed-step RK4 and residual scanning
- ``verify``: the named reproduction checks
- ``service`` / ``client`` / ``cli``: FastAPI service, its client, and the
  command-line front end
"""

__version__ = "0.1.0"

from .heisenberg import (  # noqa: F401
    BaseGeodesicParams,
    BasePoint,
    BaseTrajectory,
    ConnectionTable,
    CoordVector,
    CurvatureTable,
    FrameVector,
    base_geodesic_closed_form,
    base_geodesic_rhs,
    base_geodesic_velocity,
    christoffel_coord,
    coord_to_frame,
    covariant_deriv_along,
    curvature_apply,
    curvature_frame,
    frame_at,
    frame_connection,
    frame_to_coord,
    metric_at,
    sample_base_geodesic,
)
from .bundle import (  # noqa: F401
    BundlePoint,
    BundleState,
    BundleTrajectory,
    BundleVector,
    LiftInitialData,
    bundle_geodesic_rhs,
    euler_lagrange_residuals,
    fiber_geodesic,
    horizontal_lift_curve,
    integrate_bundle_geodesic,
    lagrangian,
    natural_lift_curve,
    sasaki_connection,
    sasaki_metric,
    sist_rhs,
    special_geodesic,
)
from .distributions import (  # noqa: F401
    BUILTIN_NAMES,
    CheckReport,
    DistributionSpec,
    builtin_distribution,
    check_distribution,
    isocline_check,
    orthonormalize,
    sample_bundle_points,
    totally_geodesic_check,
)
from .integrate import IntegratorConfig, rk4  # noqa: F401
from .verify import run_all  # noqa: F401
