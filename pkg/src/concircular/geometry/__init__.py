from .kinematics import (
    GeodesicState,
    PointState,
    ZeroVelocity,
    bivector,
    bivector_dot,
    concircular_force,
    covariant_velocity_derivative,
    force_at,
    frenet_curvature,
    frenet_curvature_at,
    lowered_curvature,
    sigma,
    sigma_at,
    signed_curvature_at,
    speed,
    spin_at,
    spin_tensor,
    star_bivector,
    star_vector,
    star_vector_inverse,
    wedge_norm,
)
from .metric import (
    CURVATURE_SIGN,
    DomainError,
    GeometryCache,
    Metric2D,
    MetricError,
    PointGeometry,
    euclidean,
    hyperbolic,
    load_metric,
    metric_from_file,
    metric_from_mapping,
    sphere,
)
