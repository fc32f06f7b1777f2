"""
DFRC Tracker - radar-assisted predictive beamforming for vehicular links.

This package simulates a road side unit that tracks a moving vehicle with
an extended Kalman filter fed by its own radar echoes, and compares it with
a feedback-based beam tracking baseline over Monte Carlo trials.
"""

from dfrc_tracker.config import ScenarioConfig, load_config
from dfrc_tracker.harness import run_monte_carlo, run_trial

__version__ = "0.1.0"
__all__ = ["ScenarioConfig", "load_config", "run_monte_carlo", "run_trial"]
