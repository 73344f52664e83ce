"""Bit-exact Q16.16 reference model of a fixed-point logistic map datapath."""

__version__ = "0.1.0"

from .errors import (
    ComparisonError,
    ConfigError,
    DomainError,
    FixRangeError,
    FxLogisticError,
    InsufficientDataError,
    ParseError,
)
from .fixq16 import (
    Fix32,
    Flagged,
    RoundMode,
    Wide64,
    convert,
    decode,
    encode,
    mul_convert,
    mul_wide,
    mul_wide_decomposed,
    one_minus,
)
from .uoml import IterationRecord, MapParams, Orbit, iterate_once, run_orbit
from .ctrlsim import FsmState, SimConfig, SimState, TraceEvent, fsm_step, run_sim
from .analysis import (
    DivergenceProfile,
    LyapunovEstimate,
    derivative,
    divergence,
    lyapunov,
)
