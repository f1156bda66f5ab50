"""Coverage and rate analysis of mmWave cellular networks."""

from ._mmcov import (
    Scenario,
    SchemaError,
    blockage_probability,
    coverage,
    fit_two_ball,
    load_scenario,
    multitier_scenario,
    parse_scenario,
    preset_names,
    preset_scenario,
    preset_two_ball,
    rate,
    simulate,
)

__all__ = [
    "Scenario",
    "SchemaError",
    "blockage_probability",
    "coverage",
    "fit_two_ball",
    "load_scenario",
    "multitier_scenario",
    "parse_scenario",
    "preset_names",
    "preset_scenario",
    "preset_two_ball",
    "rate",
    "simulate",
]
