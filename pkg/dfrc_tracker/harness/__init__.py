"""Epoch loop, Monte Carlo orchestration and artifact output."""

from dfrc_tracker.harness.monte_carlo import (
    RunResult,
    RunSummary,
    run_monte_carlo,
    run_sweep,
    splitmix64,
    summarize,
    trial_seed,
)
from dfrc_tracker.harness.outputs import (
    TRACE_COLUMNS,
    emit_outputs,
    read_trace_csv,
    summary_document,
    write_plots,
    write_summary_json,
    write_trace_csv,
)
from dfrc_tracker.harness.trial import EpochRecord, TrialResult, run_trial

__all__ = [
    # Trials
    "EpochRecord",
    "TrialResult",
    "run_trial",
    # Monte Carlo
    "RunResult",
    "RunSummary",
    "run_monte_carlo",
    "run_sweep",
    "splitmix64",
    "summarize",
    "trial_seed",
    # Outputs
    "TRACE_COLUMNS",
    "emit_outputs",
    "read_trace_csv",
    "summary_document",
    "write_plots",
    "write_summary_json",
    "write_trace_csv",
]
