"""Forward-backward diffusion lattices.

Thin wrapper over the compiled ``_fbd`` extension.
"""

from ._fbd import (  # noqa: F401
    ConfigError,
    DataError,
    FbdError,
    Potential,
    __version__,
    config_hash,
    kernel_row,
    preset_names,
    run_preset,
    run_single_interface,
    solve_limit,
)

__all__ = [
    "ConfigError",
    "DataError",
    "FbdError",
    "Potential",
    "config_hash",
    "kernel_row",
    "preset_names",
    "run_preset",
    "run_single_interface",
    "solve_limit",
]
