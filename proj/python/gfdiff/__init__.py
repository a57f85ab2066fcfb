"""g-fractional diffusion in boxes: spectral solution, first-passage statistics, CLI."""

import json

from ._core import (
    Error,
    InconclusiveLimit,
    InvalidArgument,
    NumericError,
    Solution,
    __version__,
    config_keys,
    mittag_leffler,
    run_cli,
)


def solve(config=None, **keys):
    """Build a Solution from a nested dict and/or dotted keyword overrides.

    Dots in keys are written as double underscores, e.g. clock__family="dodson".
    """
    flat = {}

    def walk(prefix, value):
        if isinstance(value, dict):
            for k, v in value.items():
                walk(f"{prefix}.{k}" if prefix else k, v)
        else:
            flat[prefix] = value

    walk("", config or {})
    for k, v in keys.items():
        flat[k.replace("__", ".")] = v
    return Solution(json.dumps(flat))


__all__ = [
    "Error",
    "InconclusiveLimit",
    "InvalidArgument",
    "NumericError",
    "Solution",
    "__version__",
    "config_keys",
    "mittag_leffler",
    "run_cli",
    "solve",
]
