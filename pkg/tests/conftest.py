"""Shared fixtures and economy builders for the test suite."""

from __future__ import annotations

from hypothesis import HealthCheck, settings

from olglab import Economy, parse_scenario
from olglab.scenario import PRESETS, apply_overrides

settings.register_profile(
    "suite", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def preset_econ(name: str, *overrides: str) -> Economy:
    """Build a preset economy, optionally with section.key=value overrides."""
    return parse_scenario(apply_overrides(PRESETS[name], list(overrides)))
