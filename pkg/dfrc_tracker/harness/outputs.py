"""Trace CSV, summary JSON and plot artifacts."""

import csv
import json
import logging
import math
from dataclasses import fields
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np

from dfrc_tracker.errors import OutputError
from dfrc_tracker.harness.trial import EpochRecord

if TYPE_CHECKING:
    from dfrc_tracker.config import ScenarioConfig
    from dfrc_tracker.harness.monte_carlo import RunSummary

logger = logging.getLogger(__name__)

TRACE_COLUMNS = tuple(f.name for f in fields(EpochRecord))
TRACE_FILE = "trace.csv"
SUMMARY_FILE = "summary.json"
ERROR_PLOT_FILE = "angle_error.svg"
RATE_PLOT_FILE = "rate.svg"

_BOOL_COLUMNS = {"clamped", "track_lost"}
_INT_COLUMNS = {"epoch", "trial"}
_STR_COLUMNS = {"scheme"}


def _format_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_trace_csv(records: list[EpochRecord], path: str | Path) -> Path:
    """
    Write records as the trace CSV.

    Floats use the shortest round-trip representation and booleans are 0/1,
    so identical records always give byte-identical files.

    Raises:
        OutputError: If the file cannot be written.
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(TRACE_COLUMNS)
            for record in records:
                writer.writerow(_format_cell(getattr(record, c)) for c in TRACE_COLUMNS)
    except OSError as e:
        raise OutputError(path, str(e)) from e
    logger.info("Wrote %d trace rows to %s", len(records), path)
    return path


def read_trace_csv(path: str | Path) -> list[EpochRecord]:
    """
    Parse a trace CSV back into records.

    Raises:
        OutputError: If the file cannot be read or its header does not match.
    """
    path = Path(path)
    try:
        with open(path, newline="", encoding="utf-8") as f:
            reader = csv.DictReader(f)
            if tuple(reader.fieldnames or ()) != TRACE_COLUMNS:
                raise OutputError(path, f"unexpected header {reader.fieldnames}")
            records = []
            for row in reader:
                kwargs: dict[str, Any] = {}
                for name, text in row.items():
                    if name in _BOOL_COLUMNS:
                        kwargs[name] = text == "1"
                    elif name in _INT_COLUMNS:
                        kwargs[name] = int(text)
                    elif name in _STR_COLUMNS:
                        kwargs[name] = text
                    else:
                        kwargs[name] = float(text)
                records.append(EpochRecord(**kwargs))
    except OSError as e:
        raise OutputError(path, str(e)) from e
    except ValueError as e:
        raise OutputError(path, f"malformed row: {e}") from e
    return records


def _json_safe(value: Any) -> Any:
    """Replace non-finite floats with None and unwrap numpy scalars."""
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def summary_document(summary: "RunSummary", config: "ScenarioConfig | None" = None) -> dict[str, Any]:
    """The summary JSON document as a plain mapping."""
    from dfrc_tracker import __version__

    echo = config.to_dict() if config is not None else {}
    # Results do not depend on the thread count.
    echo.pop("workers", None)
    return _json_safe(summary.to_dict(config_echo=echo, version=__version__))


def write_summary_json(
    summary: "RunSummary",
    path: str | Path,
    config: "ScenarioConfig | None" = None,
) -> Path:
    """
    Write the summary JSON (sorted keys, two-space indent, trailing newline).

    Raises:
        OutputError: If the file cannot be written.
    """
    path = Path(path)
    text = json.dumps(summary_document(summary, config), indent=2, sort_keys=True, allow_nan=False)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n", encoding="utf-8")
    except OSError as e:
        raise OutputError(path, str(e)) from e
    logger.info("Wrote summary to %s", path)
    return path


def write_plots(summary: "RunSummary", out_dir: str | Path) -> dict[str, Path]:
    """
    Plot mean angle error and mean rate against time, one line per scheme.

    Raises:
        OutputError: If a figure cannot be saved.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    t = summary.per_epoch.get("t_s", [])
    schemes = sorted(k for k in summary.per_epoch if k not in ("epoch", "t_s"))
    labels = {"dfrc": "DFRC (EKF)", "feedback": "Feedback"}
    panels = [
        (ERROR_PLOT_FILE, "mean_abs_err_deg", "Mean absolute angle error (deg)", True),
        (RATE_PLOT_FILE, "mean_rate", "Achievable rate (bps/Hz)", False),
    ]

    written: dict[str, Path] = {}
    with matplotlib.rc_context({"svg.hashsalt": "dfrc-tracker"}):
        for filename, key, ylabel, log_scale in panels:
            fig, ax = plt.subplots(figsize=(7, 4.5))
            for scheme in schemes:
                values = [np.nan if v is None else v for v in summary.per_epoch[scheme][key]]
                ax.plot(t, values, label=labels.get(scheme, scheme), linewidth=1.5)
            if log_scale:
                ax.set_yscale("log")
            ax.set_xlabel("Time (s)")
            ax.set_ylabel(ylabel)
            ax.grid(True, alpha=0.3)
            ax.legend()
            path = out_dir / filename
            try:
                path.parent.mkdir(parents=True, exist_ok=True)
                fig.savefig(path, format="svg", metadata={"Date": None})
            except OSError as e:
                raise OutputError(path, str(e)) from e
            finally:
                plt.close(fig)
            written[key] = path
    logger.info("Wrote plots to %s", out_dir)
    return written


def emit_outputs(
    records: list[EpochRecord],
    summary: "RunSummary",
    out_dir: str | Path,
    plots: bool = False,
    config: "ScenarioConfig | None" = None,
) -> dict[str, Path]:
    """
    Write the trace CSV, the summary JSON and optionally the SVG plots.

    Returns:
        Mapping of artifact name ("trace", "summary", "mean_abs_err_deg",
        "mean_rate") to its path.

    Raises:
        OutputError: If out_dir or any artifact is not writable.
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OutputError(out_dir, str(e)) from e

    artifacts = {
        "trace": write_trace_csv(records, out_dir / TRACE_FILE),
        "summary": write_summary_json(summary, out_dir / SUMMARY_FILE, config),
    }
    if plots:
        artifacts.update(write_plots(summary, out_dir))
    return artifacts
