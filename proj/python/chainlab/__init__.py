"""Long-range harmonic chain with momentum-exchange noise: dispersion, schedules and convergence runs."""

import json

from ._chainlab import (
    DomainError,
    NonConvergence,
    Schedule,
    UsageError,
    alpha_hat,
    const_c1,
    const_c2,
    forward_transform,
    inverse_transform,
    omega,
    semigroup_multiplier,
)
from ._chainlab import default_config as _default_config
from ._chainlab import run_json as _run_json


def default_config():
    return json.loads(_default_config())


def run(**overrides):
    """Run one experiment; keys are the dotted config keys with '.' written as '__'."""
    cfg = {k.replace("__", "."): v for k, v in overrides.items()}
    return json.loads(_run_json(json.dumps(cfg)))


__all__ = [
    "DomainError",
    "NonConvergence",
    "Schedule",
    "UsageError",
    "alpha_hat",
    "const_c1",
    "const_c2",
    "default_config",
    "forward_transform",
    "inverse_transform",
    "omega",
    "run",
    "semigroup_multiplier",
]
