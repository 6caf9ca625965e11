"""aerosid: longitudinal flight simulation and GP aerodynamic identification.

The package has two halves.  The forward half (dynsim, aeromean, atmosphere)
flies a polynomial truth model through trim points and maneuvers and emits
telemetry records with exact truth channels retained.  The inverse half
(flightdata, gpr, trimfit, lineardyn, pipeline) extracts coefficient samples
from telemetry, fits physics-prior Gaussian processes to them, regresses trim
schedules, and differentiates the posterior at trim to predict short-period
frequency and damping across the flight envelope.
"""

from .errors import (
    AerosidError,
    ConditioningError,
    ConfigError,
    DataError,
    DegenerateDesignError,
    DegenerateSampleError,
    DivergenceError,
    ExtrapolationError,
    FormatError,
    HullError,
    InsufficientDataError,
    LogDomainError,
    NoTrimError,
    NumericError,
    SchemaError,
    UnitError,
    ValidationError,
)
from .flightstate import (
    STATE_DIM,
    STATE_NAMES,
    AircraftGeometry,
    FlightState,
)
from .aeromean import (
    AeroModelPair,
    AeroTerm,
    GenericAeroModel,
    Hull,
    PriorCatalogEntry,
    load_prior,
    load_shipped_prior,
    save_prior,
    shipped_prior_path,
)
from .flightdata import (
    CoefficientSample,
    ManeuverRecord,
    TruthChannels,
    decimate,
    decimate_samples,
    export_csv,
    extract_cm,
    extract_cm_values,
    extract_cz,
    extract_cz_values,
    ingest_csv,
    local_poly_derivative,
    read_record_csv,
)
from .dynsim import (
    KIND_DOUBLET,
    KIND_ROLLERCOASTER,
    KIND_TRIM_SHOT,
    ManeuverSpec,
    NoiseSpec,
    SimState,
    TrimShot,
    TrimSolution,
    TruthModel,
    apply_noise,
    fly,
    fly_doublet,
    fly_rollercoaster,
    fly_trim_hold,
    fly_trim_shots,
    integrate,
    solve_trim,
)
from .lineardyn import (
    CoefficientDerivatives,
    DimensionalDerivatives,
    ShortPeriodResult,
    alpha_transfer_function,
    dimensionalize,
    linearize_truth,
    one_dof_short_period,
    short_period_from_eigenvalues,
    short_period_with_mq_substitution,
    two_dof_short_period,
)
from .gpr import (
    GpModel,
    KERNEL_NN,
    KERNEL_SE,
    KernelSpec,
    Standardizer,
    estimate_noise_variance,
    fit,
    fit_arrays,
    kernel_eval,
    load_checkpoint,
)
from .trimfit import (
    TrimFunctions,
    TrimPoint,
    extract_trim_shots,
    fit_trim_functions,
    read_trim_shots_csv,
    trim_state,
    write_trim_shots_csv,
)
from .pipeline import (
    InverseResult,
    PreparedPrior,
    ReferenceFixture,
    RunConfig,
    RunResult,
    SHIPPED_FIXTURE,
    SweepGrid,
    SweepResult,
    SweepRow,
    compare_to_fixture,
    forward_process,
    gather_extra_shots,
    gather_records,
    inverse_process,
    load_run_config,
    load_trim_functions,
    parse_run_config,
    read_sweep_csv,
    run_experiment,
    save_trim_functions,
    stability_derivatives_at,
    sweep_short_period,
)
from .verify import (
    VerifySuiteResult,
    run_all as run_verify_suites,
    run_eigen_suite,
    run_gradient_suite,
    run_interpolation_suite,
)

__version__ = "0.1.0"

__all__ = [
    "AerosidError", "ConditioningError", "ConfigError", "DataError",
    "DegenerateDesignError", "DegenerateSampleError", "DivergenceError",
    "ExtrapolationError", "FormatError", "HullError", "InsufficientDataError",
    "LogDomainError", "NoTrimError", "NumericError", "SchemaError",
    "UnitError", "ValidationError",
    "STATE_DIM", "STATE_NAMES", "AircraftGeometry", "FlightState",
    "AeroModelPair", "AeroTerm", "GenericAeroModel", "Hull",
    "PriorCatalogEntry", "load_prior", "load_shipped_prior", "save_prior",
    "shipped_prior_path",
    "CoefficientSample", "ManeuverRecord", "TruthChannels",
    "decimate", "decimate_samples", "export_csv",
    "extract_cm", "extract_cm_values", "extract_cz", "extract_cz_values",
    "ingest_csv", "local_poly_derivative",
    "read_record_csv",
    "KIND_DOUBLET", "KIND_ROLLERCOASTER", "KIND_TRIM_SHOT",
    "ManeuverSpec", "NoiseSpec", "SimState", "TrimShot", "TrimSolution",
    "TruthModel", "apply_noise", "fly", "fly_doublet", "fly_rollercoaster",
    "fly_trim_hold", "fly_trim_shots", "integrate", "solve_trim",
    "CoefficientDerivatives", "DimensionalDerivatives", "ShortPeriodResult",
    "alpha_transfer_function", "dimensionalize", "linearize_truth",
    "one_dof_short_period", "short_period_from_eigenvalues",
    "short_period_with_mq_substitution", "two_dof_short_period",
    "GpModel", "KERNEL_NN", "KERNEL_SE", "KernelSpec", "Standardizer",
    "estimate_noise_variance", "fit", "fit_arrays", "kernel_eval",
    "load_checkpoint",
    "TrimFunctions", "TrimPoint", "extract_trim_shots", "fit_trim_functions",
    "read_trim_shots_csv", "trim_state", "write_trim_shots_csv",
    "InverseResult", "PreparedPrior", "ReferenceFixture", "RunConfig",
    "RunResult", "SHIPPED_FIXTURE", "SweepGrid", "SweepResult", "SweepRow",
    "compare_to_fixture", "forward_process", "gather_extra_shots",
    "gather_records", "inverse_process", "load_run_config",
    "load_trim_functions", "parse_run_config", "read_sweep_csv",
    "run_experiment", "save_trim_functions", "stability_derivatives_at",
    "sweep_short_period",
    "VerifySuiteResult", "run_eigen_suite", "run_gradient_suite",
    "run_interpolation_suite", "run_verify_suites",
    "__version__",
]
