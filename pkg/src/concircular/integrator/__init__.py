from .analysis import circle_fit
from .core import (
    EQUATIONS,
    METHODS,
    STEP_FLOOR,
    DomainExit,
    IntegrationError,
    IntegrationSettings,
    KinematicState,
    StepFloorReached,
    Trajectory,
    integrate,
)
from .equations import (
    GAUGES,
    coordinate_jerk,
    covariant_jerk,
    geocircle_residual,
    myeq_residual,
    rhs_euler_poisson,
    rhs_geocircle,
)
from .export import read_csv, write_csv, write_text
