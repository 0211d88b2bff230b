"""Discrete-event simulator comparing 802.11 DCF backoff algorithms in
multi-hop mobile ad hoc networks."""

from .backoff import (BackoffParams, ContentionState, Policy, draw_backoff,
                      fresh_state, on_collision, on_success)
from .kernel import EventKind, Kernel, KernelError, RandomSource
from .metrics import RunMetrics, avg_end_to_end_delay, pdr
from .microsim import MicroConfig, run_micro
from .runner import run_one, run_sweep, summarize_best_worst, write_csv
from .scenario import ConfigError, Scenario, SweepSpec, load_scenario
from .simulation import Simulation

__version__ = "0.1.0"

__all__ = [
    "BackoffParams", "ContentionState", "Policy", "draw_backoff", "fresh_state",
    "on_collision", "on_success", "EventKind", "Kernel", "KernelError",
    "RandomSource", "RunMetrics", "avg_end_to_end_delay", "pdr", "MicroConfig",
    "run_micro", "run_one", "run_sweep", "summarize_best_worst", "write_csv",
    "ConfigError", "Scenario", "SweepSpec", "load_scenario", "Simulation",
    "__version__",
]
