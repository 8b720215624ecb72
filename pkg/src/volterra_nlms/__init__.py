"""Third-order Volterra models of nonlinear audio systems, trained with NLMS."""

from .errors import (
    ConfigError,
    DivergenceError,
    DomainError,
    IndexOrderError,
    InputError,
    NumericError,
    ParseError,
    SpecError,
    VolterraError,
)
from .evaluation import EvalReport, EvalRow, evaluate_suite, mse
from .kernel import (
    RegressorSet,
    SignalBuffer,
    VolterraKernel,
    apply_kernel,
    apply_kernel_naive,
    build_regressors,
    coeff_count,
    idx2,
    idx3,
)
from .nlms import TrainerConfig, TrainingTrace, init_kernel, learning_rate, nlms_step, train
from .oracle import OracleSpec, make_default_speaker, measure
from .signals import SignalSpec, gen

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DivergenceError",
    "DomainError",
    "IndexOrderError",
    "InputError",
    "NumericError",
    "ParseError",
    "SpecError",
    "VolterraError",
    "EvalReport",
    "EvalRow",
    "evaluate_suite",
    "mse",
    "RegressorSet",
    "SignalBuffer",
    "VolterraKernel",
    "apply_kernel",
    "apply_kernel_naive",
    "build_regressors",
    "coeff_count",
    "idx2",
    "idx3",
    "TrainerConfig",
    "TrainingTrace",
    "init_kernel",
    "learning_rate",
    "nlms_step",
    "train",
    "OracleSpec",
    "make_default_speaker",
    "measure",
    "SignalSpec",
    "gen",
]
