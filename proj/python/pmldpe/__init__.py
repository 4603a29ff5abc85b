# SPDX-License-Identifier: Apache-2.0
"""Python access to the pmldpe direct position estimation core."""

from ._core import (
    PmldpeError,
    capon_weights,
    config_hash,
    core_checks,
    fb_covariance,
    feasibility,
    forward_covariance,
    global_to_local,
    los_bearing,
    run_monte_carlo,
    scenario_ini,
    smooth_music,
    stationarity_time,
    steering,
)

__all__ = [
    "PmldpeError",
    "capon_weights",
    "config_hash",
    "core_checks",
    "fb_covariance",
    "feasibility",
    "forward_covariance",
    "global_to_local",
    "los_bearing",
    "run_monte_carlo",
    "scenario_ini",
    "smooth_music",
    "stationarity_time",
    "steering",
]
