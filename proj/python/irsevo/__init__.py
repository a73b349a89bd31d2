"""Service-selection dynamics in IRS-assisted networks."""

from ._irsevo import (
    IoError,
    NumericalError,
    Scenario,
    Strategy,
    ValidationError,
    __version__,
    absorption_loss,
    build_economics,
    delay_bound,
    list_experiments,
    load_scenario,
    los_path_gain,
    optimize_strategy,
    picard,
    run_experiment,
    simulate,
    spreading_loss,
    steering_vector,
)

__all__ = [
    "IoError",
    "NumericalError",
    "Scenario",
    "Strategy",
    "ValidationError",
    "__version__",
    "absorption_loss",
    "build_economics",
    "delay_bound",
    "list_experiments",
    "load_scenario",
    "los_path_gain",
    "optimize_strategy",
    "picard",
    "run_experiment",
    "simulate",
    "spreading_loss",
    "steering_vector",
]
