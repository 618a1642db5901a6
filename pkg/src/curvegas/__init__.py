"""Gas flow on a quadratic space curve: exact solutions, reduced
equations in invariant coordinates, and the density-series hierarchy.

The package is organized bottom-up:

``numerics``
    Hand-rolled deterministic kernels: finite differences, adaptive
    Simpson quadrature, an embedded Runge-Kutta pair with event
    detection, cubic root finding, planar stability classification.
``thermo``
    Gas parameters and the thermodynamic potential (ideal and virial
    forms) with pressure, entropy, and admissibility derived from it.
``euler``
    The flow system on the curve, two closed-form solution families,
    pointwise residuals, the principal symbol, and the differential
    invariants that bridge to the reduced picture.
``quotient``
    The reduced second-order system in invariant coordinates, two exact
    field families, characteristic directions, and the 4x4 symbol.
``virial_flow``
    The series-in-density hierarchy: flow-temperature profiles, phase
    portraits of the reduced planar system, and the first-order linear
    system.
``cli``
    The ``curvegas`` command: cross-verification report, fixed points,
    portraits, solution grids, and expansion tables.
"""

from .numerics import (
    EigenClass,
    Grid1D,
    Grid2D,
    NonFiniteSample,
    NoRoots,
    OdeResult,
    SingularityEncountered,
    ToleranceNotMet,
    UnsupportedOrder,
    classify_2x2,
    cubic_real_roots,
    fd_derivative,
    ode_solve,
    quadrature,
)
from .thermo import (
    ConfigError,
    DomainError,
    GasParams,
    PlanckPotential,
    VirialCoefficient,
    admissibility,
    default_config,
    entropy,
    entropy_partials,
    ideal_gas_potential,
    load_config,
    parse_config,
    pressure,
    pressure_partials,
    virial_potential,
)
from .euler import (
    FlowField,
    OutsideValidity,
    SolutionConstants,
    characteristic_speeds,
    correspondence_window,
    euler_residual,
    euler_residual_grid,
    euler_symbol,
    invariants_of_flow,
    solution_family_1,
    solution_family_2,
    validity_window,
)
from .quotient import (
    AltFormUnavailable,
    CharacteristicField,
    EmptyDomain,
    NondegeneracyViolated,
    QuotientJet,
    TresseField,
    characteristic_fields,
    first_integral_residual,
    quotient_residual,
    quotient_residual_alt4,
    quotient_symbol,
    quotsol1,
    quotsol2,
)
from .virial_flow import (
    DegenerateScaling,
    ExpansionOrders,
    FixedPoint,
    OffTrajectory,
    OnBreakingParabola,
    Portrait,
    ReducedParams,
    SingularLeadingCoefficient,
    StopReason,
    Trajectory,
    ZerothTerm,
    as_planar_system,
    default_portrait_window,
    first_order_residual,
    first_order_rhs,
    fixed_points,
    flow_temperature_rhs,
    integrate_first_order,
    integrate_trajectory,
    portrait,
    rescale_to_reduced,
    zeroth_residual,
)

__version__ = "0.1.0"

__all__ = [
    "EigenClass", "Grid1D", "Grid2D", "NonFiniteSample", "NoRoots",
    "OdeResult", "SingularityEncountered", "ToleranceNotMet",
    "UnsupportedOrder", "classify_2x2", "cubic_real_roots",
    "fd_derivative", "ode_solve", "quadrature",
    "ConfigError", "DomainError", "GasParams", "PlanckPotential",
    "VirialCoefficient", "admissibility", "default_config", "entropy",
    "entropy_partials", "ideal_gas_potential", "load_config",
    "parse_config", "pressure", "pressure_partials", "virial_potential",
    "FlowField", "OutsideValidity", "SolutionConstants",
    "characteristic_speeds", "correspondence_window", "euler_residual",
    "euler_residual_grid", "euler_symbol", "invariants_of_flow",
    "solution_family_1", "solution_family_2", "validity_window",
    "AltFormUnavailable", "CharacteristicField", "EmptyDomain",
    "NondegeneracyViolated", "QuotientJet", "TresseField",
    "characteristic_fields", "first_integral_residual",
    "quotient_residual", "quotient_residual_alt4", "quotient_symbol",
    "quotsol1", "quotsol2",
    "DegenerateScaling", "ExpansionOrders", "FixedPoint",
    "OffTrajectory", "OnBreakingParabola", "Portrait", "ReducedParams",
    "SingularLeadingCoefficient", "StopReason", "Trajectory",
    "ZerothTerm", "as_planar_system", "default_portrait_window",
    "first_order_residual", "first_order_rhs", "fixed_points",
    "flow_temperature_rhs", "integrate_first_order",
    "integrate_trajectory", "portrait", "rescale_to_reduced",
    "zeroth_residual",
    "__version__",
]
