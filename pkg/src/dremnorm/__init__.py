"""Identification of LTI plant parameters from one-shot excitation.

The toolkit builds a measurable linear regression from plant input/output
via state-variable filters, decouples it into scalar regressions per
parameter through delay extension and adjugate mixing, and normalizes the
scalar regressor's order of magnitude so one adaptation gain yields the
same parameter-error bound across regressor amplitudes. Plain and
classically normalized gradient loops are included as baselines, together
with excitation analysis (levels, order-change times, error bounds) and a
configuration-driven experiment CLI.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .analysis import (
    ExcitationReport,
    OrderChangeTimes,
    Regime,
    analyze_excitation,
    classify_regime,
    error_bounds,
    excitation_level,
    family_delta_min,
    order_change_times,
    phi_excitation,
    ub_curve,
)
from .errors import ConfigError, NumericalError
from .estimators import (
    NORM_CLASSICAL,
    NORM_EXCITATION,
    PLAIN,
    EstimatorState,
    estimate_series,
    make_estimator,
    step_norm_classical,
    step_norm_excitation,
    step_plain,
)
from .experiment import (
    ExperimentConfig,
    ExperimentResult,
    SyntheticConfig,
    SyntheticResult,
    load_config,
    load_preset,
    run_experiment,
    run_gamma_sweep,
    run_synthetic,
    save_config,
)
from .lti import StateSpace, TransferFunction, realize_state_space, simulate
from .mixing import (
    DelayBank,
    ExtendedFrame,
    MixedRegression,
    adjugate_det,
    extend,
    mix,
    mix_series,
)
from .normalizer import (
    NormalizedRegression,
    NormalizerConfig,
    NumericOrder,
    finite_time_retrieve,
    normalize,
    normalize_series,
    numeric_order,
    saturate,
)
from .signals import SampledSignal, add_noise, make_step_input
from .svf import FilterBank, FilterSpec, RegressionFrame, build_filters, filter_step

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "__version__",
    # errors
    "ConfigError",
    "NumericalError",
    # signals
    "SampledSignal",
    "make_step_input",
    "add_noise",
    # plant
    "TransferFunction",
    "StateSpace",
    "realize_state_space",
    "simulate",
    # regression
    "FilterSpec",
    "FilterBank",
    "RegressionFrame",
    "build_filters",
    "filter_step",
    # mixing
    "DelayBank",
    "ExtendedFrame",
    "MixedRegression",
    "adjugate_det",
    "extend",
    "mix",
    "mix_series",
    # normalization
    "NumericOrder",
    "NormalizerConfig",
    "NormalizedRegression",
    "numeric_order",
    "saturate",
    "normalize",
    "normalize_series",
    "finite_time_retrieve",
    # estimators
    "PLAIN",
    "NORM_EXCITATION",
    "NORM_CLASSICAL",
    "EstimatorState",
    "make_estimator",
    "step_plain",
    "step_norm_excitation",
    "step_norm_classical",
    "estimate_series",
    # analysis
    "ExcitationReport",
    "OrderChangeTimes",
    "Regime",
    "analyze_excitation",
    "classify_regime",
    "excitation_level",
    "order_change_times",
    "phi_excitation",
    "error_bounds",
    "family_delta_min",
    "ub_curve",
    # experiment
    "ExperimentConfig",
    "SyntheticConfig",
    "ExperimentResult",
    "SyntheticResult",
    "run_experiment",
    "run_synthetic",
    "run_gamma_sweep",
    "load_config",
    "save_config",
    "load_preset",
]
