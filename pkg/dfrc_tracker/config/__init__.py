"""Configuration module for DFRC Tracker."""

from dfrc_tracker.config.scenario import (
    ANTENNA_ALIAS,
    SCHEMES,
    ScenarioConfig,
    config_from_dict,
    load_config,
)

__all__ = [
    "ANTENNA_ALIAS",
    "SCHEMES",
    "ScenarioConfig",
    "config_from_dict",
    "load_config",
]
