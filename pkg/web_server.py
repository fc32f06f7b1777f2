import asyncio
import logging
import os
import threading
from pathlib import Path
from typing import Any

import uvicorn
from dotenv import load_dotenv
from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import HTMLResponse
from fastapi.templating import Jinja2Templates
from pydantic import BaseModel, Field

from dfrc_tracker import __version__
from dfrc_tracker.config import SCHEMES, ScenarioConfig, load_config
from dfrc_tracker.errors import ConfigError, OutputError
from dfrc_tracker.harness import run_monte_carlo, run_trial, summary_document, trial_seed

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

app = FastAPI(title="DFRC Tracker", version=__version__)

TEMPLATES_DIR = Path(__file__).resolve().parent / "templates"

templates = Jinja2Templates(directory=TEMPLATES_DIR)

# Simulations are CPU bound; run one at a time
run_lock = threading.Lock()


class TrialRequest(BaseModel):
    scheme: str = "dfrc"
    index: int = Field(0, ge=0)
    overrides: dict[str, Any] = Field(default_factory=dict)


class RunRequest(BaseModel):
    overrides: dict[str, Any] = Field(default_factory=dict)
    out_dir: str | None = None
    plots: bool = False


def base_config() -> ScenarioConfig:
    """Scenario from DFRC_TRACKER_CONFIG, or the built-in defaults."""
    return load_config(os.getenv("DFRC_TRACKER_CONFIG") or None)


def output_root() -> Path:
    """Directory every web-triggered run writes under."""
    return Path(os.getenv("DFRC_TRACKER_OUT", "out")).resolve()


def _resolve_out_dir(out_dir: str | None) -> Path | None:
    if out_dir is None:
        return None
    root = output_root()
    target = (root / out_dir).resolve()
    if not target.is_relative_to(root):
        raise HTTPException(status_code=400, detail=f"out_dir must stay under {root}")
    return target


def _configure(overrides: dict[str, Any]) -> ScenarioConfig:
    try:
        return base_config().with_overrides(**overrides)
    except ConfigError as e:
        raise HTTPException(status_code=400, detail=str(e)) from e


@app.get("/", response_class=HTMLResponse)
async def index(request: Request):
    # Reload env vars to pick up changes in .env without restarting
    load_dotenv(override=True)
    try:
        cfg = base_config()
    except ConfigError as e:
        raise HTTPException(status_code=400, detail=str(e)) from e
    return templates.TemplateResponse(
        request,
        "index.html",
        {"version": __version__, "config": cfg.to_dict(), "schemes": SCHEMES},
    )


@app.get("/api/config")
def get_config():
    """The scenario every request starts from."""
    try:
        return base_config().to_dict()
    except ConfigError as e:
        raise HTTPException(status_code=400, detail=str(e)) from e


@app.post("/api/trial")
async def post_trial(body: TrialRequest):
    if body.scheme not in SCHEMES:
        raise HTTPException(status_code=400, detail=f"Unknown scheme: {body.scheme}")
    cfg = _configure(body.overrides)
    seed = trial_seed(cfg.master_seed, body.index)

    def _run():
        with run_lock:
            return run_trial(cfg, body.scheme, seed, trial_index=body.index)

    # Run in a separate thread to avoid blocking the event loop
    loop = asyncio.get_running_loop()
    result = await loop.run_in_executor(None, _run)
    return {
        "scheme": result.scheme,
        "trial": result.trial,
        "seed": result.seed,
        "diverged": result.diverged,
        "covariance_ok": result.covariance_ok,
        "rate_bound_ok": result.rate_bound_ok,
        "gated_updates": result.gated_updates,
        "records": [
            {**vars(r), "abs_error_deg": r.abs_error_deg} for r in result.records
        ],
    }


@app.post("/api/run")
async def post_run(body: RunRequest):
    cfg = _configure(body.overrides)
    out_dir = _resolve_out_dir(body.out_dir)

    def _run():
        with run_lock:
            return run_monte_carlo(cfg, out_dir=out_dir, plots=body.plots)

    loop = asyncio.get_running_loop()
    try:
        run = await loop.run_in_executor(None, _run)
    except OutputError as e:
        logger.error("Run failed: %s", e)
        raise HTTPException(status_code=500, detail=str(e)) from e
    return {
        "summary": summary_document(run.summary, cfg),
        "all_diverged": run.all_diverged,
        "artifacts": {name: str(path) for name, path in run.artifacts.items()},
    }


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO)
    uvicorn.run(app, host="0.0.0.0", port=int(os.getenv("PORT", "8000")))
