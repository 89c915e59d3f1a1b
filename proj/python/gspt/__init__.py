"""Python bindings for the gspt C++ library."""

from ._gspt import (  # noqa: F401
    Error,
    PreconditionError,
    DomainError,
    ConvergenceError,
    ConsistencyError,
    DegeneracyError,
    AssumptionFailure,
    Model,
    list_models,
    default_params,
    contact_points,
    n_singularities,
    critical_curve,
    singular_cycle,
    limit_cycle,
    section_offsets,
    scaling_report,
    classify_regime,
    regime_sweep,
    stroke_phase_diagram,
    omega0,
    airy_first_zero,
    riccati_special_solution,
    riccati_tails,
)

__version__ = "0.1.0"
