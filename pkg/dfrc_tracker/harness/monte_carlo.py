"""Monte Carlo orchestration and aggregation."""

import json
import logging
import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from tqdm import tqdm

from dfrc_tracker.config import ScenarioConfig
from dfrc_tracker.errors import OutputError
from dfrc_tracker.harness.outputs import emit_outputs
from dfrc_tracker.harness.trial import EpochRecord, TrialResult, run_trial

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1


def splitmix64(i: int) -> int:
    """SplitMix64 finalizer applied to i + golden-ratio increment."""
    z = (i + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def trial_seed(master_seed: int, i: int) -> int:
    """Seed of trial i: master_seed XOR splitmix64(i)."""
    return (master_seed ^ splitmix64(i)) & _MASK64


@dataclass
class RunSummary:
    """
    Per-epoch and per-scheme aggregates over trials.

    per_epoch maps "epoch"/"t_s" to arrays and each scheme to a dict of
    arrays (mean_abs_err_deg, rms_err_deg, mean_rate, rate_stderr, trials).
    per_scheme maps each scheme to scalar aggregates.
    """

    per_epoch: dict[str, Any] = field(default_factory=dict)
    per_scheme: dict[str, dict[str, Any]] = field(default_factory=dict)

    def to_dict(self, config_echo: dict[str, Any] | None = None, version: str = "") -> dict[str, Any]:
        return {
            "config_echo": config_echo or {},
            "per_epoch": self.per_epoch,
            "per_scheme": self.per_scheme,
            "version": version,
        }


@dataclass
class RunResult:
    """Everything a Monte Carlo run produced."""

    trials: list[TrialResult]
    summary: RunSummary
    artifacts: dict[str, Path] = field(default_factory=dict)

    @property
    def records(self) -> list[EpochRecord]:
        return [r for t in self.trials for r in t.records]

    @property
    def all_diverged(self) -> bool:
        return bool(self.trials) and all(t.diverged for t in self.trials)


def _sort_key(record: EpochRecord) -> tuple:
    return (record.scheme, record.trial, record.epoch)


def summarize(records: list[EpochRecord]) -> RunSummary:
    """
    Aggregate records into a RunSummary.

    Records are ordered by (scheme, trial, epoch) first, so the result is
    identical for any input order, including records read back from a trace CSV.
    """
    records = sorted(records, key=_sort_key)
    if not records:
        return RunSummary(per_epoch={"epoch": [], "t_s": []}, per_scheme={})

    by_scheme: dict[str, dict[int, list[EpochRecord]]] = defaultdict(lambda: defaultdict(list))
    times: dict[int, float] = {}
    for record in records:
        by_scheme[record.scheme][record.epoch].append(record)
        times.setdefault(record.epoch, record.t_s)

    epochs = sorted(times)
    per_epoch: dict[str, Any] = {"epoch": epochs, "t_s": [times[e] for e in epochs]}
    per_scheme: dict[str, dict[str, Any]] = {}
    mean_errors: dict[str, list[float | None]] = {}

    for scheme in sorted(by_scheme):
        columns: dict[str, list] = {
            "mean_abs_err_deg": [],
            "rms_err_deg": [],
            "mean_rate": [],
            "rate_stderr": [],
            "trials": [],
        }
        for epoch in epochs:
            group = by_scheme[scheme].get(epoch, [])
            if not group:
                for values in columns.values():
                    values.append(None)
                continue
            errors = np.array([r.abs_error_deg for r in group])
            rates = np.array([r.rate_bpshz for r in group])
            columns["mean_abs_err_deg"].append(float(np.mean(errors)))
            columns["rms_err_deg"].append(float(np.sqrt(np.mean(errors**2))))
            columns["mean_rate"].append(float(np.mean(rates)))
            stderr = float(np.std(rates, ddof=1) / math.sqrt(rates.size)) if rates.size > 1 else 0.0
            columns["rate_stderr"].append(stderr)
            columns["trials"].append(len(group))
        per_epoch[scheme] = columns
        mean_errors[scheme] = columns["mean_abs_err_deg"]

        scheme_records = [r for group in by_scheme[scheme].values() for r in group]
        all_errors = np.array([r.abs_error_deg for r in scheme_records])
        trial_lengths: dict[int, int] = defaultdict(int)
        for r in scheme_records:
            trial_lengths[r.trial] += 1
        per_scheme[scheme] = {
            "mean_abs_err_deg": float(np.mean(all_errors)),
            "rms_err_deg": float(np.sqrt(np.mean(all_errors**2))),
            "max_mean_abs_err_deg": max(v for v in columns["mean_abs_err_deg"] if v is not None),
            "mean_rate": float(np.mean([r.rate_bpshz for r in scheme_records])),
            "trials": len(trial_lengths),
            "incomplete_trials": sum(1 for n in trial_lengths.values() if n < len(epochs)),
            "clamp_events": sum(r.clamped for r in scheme_records),
            "track_loss_events": sum(r.track_lost for r in scheme_records),
        }

    if len(mean_errors) == 2:
        (a, errs_a), (b, errs_b) = sorted(mean_errors.items())
        paired = [(x, y) for x, y in zip(errs_a, errs_b) if x is not None and y is not None]
        if paired:
            per_scheme[a]["fraction_epochs_better"] = sum(x < y for x, y in paired) / len(paired)
            per_scheme[b]["fraction_epochs_better"] = sum(y < x for x, y in paired) / len(paired)

    return RunSummary(per_epoch=per_epoch, per_scheme=per_scheme)


def run_monte_carlo(
    cfg: ScenarioConfig,
    out_dir: str | Path | None = None,
    plots: bool = False,
    progress: bool = False,
) -> RunResult:
    """
    Run cfg.trials trials of every configured scheme and aggregate them.

    Trial i of every scheme uses seed master_seed XOR splitmix64(i). Trials
    run on cfg.workers threads; results are ordered by (scheme, trial)
    regardless of completion order.

    Args:
        cfg: Scenario configuration.
        out_dir: When set, trace CSV, summary JSON and optional plots are written here.
        plots: Also write SVG plots.
        progress: Show a progress bar.

    Raises:
        OutputError: If artifacts cannot be written.
    """
    jobs = [
        (scheme, i, trial_seed(cfg.master_seed, i))
        for scheme in sorted(cfg.schemes)
        for i in range(cfg.trials)
    ]
    logger.info(
        "Running %d trials x %d schemes on %d worker(s)", cfg.trials, len(cfg.schemes), cfg.workers
    )

    def _job(job: tuple[str, int, int]) -> TrialResult:
        scheme, i, seed = job
        return run_trial(cfg, scheme, seed, trial_index=i)

    bar = tqdm(total=len(jobs), desc="trials", disable=not progress)
    results: list[TrialResult] = []
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        for result in pool.map(_job, jobs):
            results.append(result)
            bar.update(1)
    bar.close()

    results.sort(key=lambda t: (t.scheme, t.trial))
    for t in results:
        if t.diverged:
            logger.warning("%s trial %d diverged after %d epochs", t.scheme, t.trial, len(t.records))

    run = RunResult(trials=results, summary=summarize([r for t in results for r in t.records]))
    if out_dir is not None:
        run.artifacts = emit_outputs(run.records, run.summary, out_dir, plots=plots, config=cfg)
    return run


def run_sweep(
    cfg: ScenarioConfig,
    key: str,
    values: list[Any],
    out_dir: str | Path | None = None,
    plots: bool = False,
    progress: bool = False,
) -> dict[str, RunResult]:
    """
    Repeat the Monte Carlo run once per value of one config key.

    Each value writes into its own `<key>=<value>` subdirectory of out_dir,
    and out_dir gets a sweep.json index of per-scheme aggregates.

    Raises:
        ConfigError: If key is unknown or a value is invalid.
        OutputError: If artifacts cannot be written.
    """
    runs: dict[str, RunResult] = {}
    for value in values:
        label = f"{key}={value}"
        sub_cfg = cfg.with_overrides(**{key: value})
        logger.info("Sweep point %s", label)
        sub_dir = Path(out_dir) / label if out_dir is not None else None
        runs[label] = run_monte_carlo(sub_cfg, sub_dir, plots=plots, progress=progress)

    if out_dir is not None:
        index = {
            "key": key,
            "values": list(values),
            "per_scheme": {label: run.summary.per_scheme for label, run in runs.items()},
        }
        path = Path(out_dir) / "sweep.json"
        try:
            path.write_text(json.dumps(index, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        except OSError as e:
            raise OutputError(path, str(e)) from e
    return runs
