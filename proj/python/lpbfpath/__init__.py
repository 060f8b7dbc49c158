"""DRL toolpath generation toolkit for laser powder bed fusion."""

from ._core import (
    Move,
    Policy,
    SampleGrid,
    Toolpath,
    OBSERVATION_DIM,
    __version__,
    atg_greedy,
    bellman_target,
    calibrate_absorptivity,
    chessboard,
    collision_penalty,
    epsilon,
    gcode_text,
    isolated_penalty,
    reward_main,
    sample_grid,
    simulate_depths,
    train,
    turning_angle_deg,
    zigzag,
)

__all__ = [
    "Move",
    "Policy",
    "SampleGrid",
    "Toolpath",
    "OBSERVATION_DIM",
    "__version__",
    "atg_greedy",
    "bellman_target",
    "calibrate_absorptivity",
    "chessboard",
    "collision_penalty",
    "epsilon",
    "gcode_text",
    "isolated_penalty",
    "reward_main",
    "sample_grid",
    "simulate_depths",
    "train",
    "turning_angle_deg",
    "zigzag",
]
