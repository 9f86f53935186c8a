from .checks import (
    CheckItem,
    CheckReport,
    NonconformantPattern,
    NonInvertibleA,
    SymmetryGenerator,
    equation_checklist,
    first_integral_check,
    helmholtz_check,
    line_inclusion_check,
    restrict_to_shell,
    shell_acceleration,
    symmetry_check,
    variationality_check,
    verify_theorem,
)
from .coefficients import EulerPoissonCoefficients, PatternReport, extract_coefficients, helmholtz_residuals
from .forms import DifferentialForm, SourceForm, euler_poisson, i_r, lagrange_derivative, total_derivative
from .lagrangians import (
    LAGRANGIAN_PRESETS,
    PERTURBATIONS,
    SOURCE_PRESETS,
    lagrangian_preset,
    resolve_lagrangian,
    source_preset,
    theorem_coefficients,
    theorem_source,
)
from .mechanics import RouteDisagreement, ZermeloReport, hamiltonian, momenta, zermelo_check, zeta1, zeta2
