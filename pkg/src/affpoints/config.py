"""Run configuration with environment overrides.

Every tolerance the solvers consult lives here so a single object can be
threaded through the CLI.  Environment variables (AFFPOINTS_*) override the
defaults at import time; explicit keyword arguments on the individual
functions override both.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields

_ENV_MAP = {
    "boundary_tol": "AFFPOINTS_TOL_BOUNDARY",
    "support_tol": "AFFPOINTS_TOL_SUPPORT",
    "solver_tol": "AFFPOINTS_TOL_SOLVER",
    "group_tol": "AFFPOINTS_TOL_GROUP",
    "polar_margin": "AFFPOINTS_POLAR_MARGIN",
    "sphere_samples": "AFFPOINTS_SPHERE_SAMPLES",
    "mc_samples": "AFFPOINTS_MC_SAMPLES",
    "mc_max_stderr": "AFFPOINTS_MC_MAX_STDERR",
    "seed": "AFFPOINTS_SEED",
    "kernels": "AFFPOINTS_KERNELS",
}


@dataclass
class RunConfig:
    boundary_tol: float = 1e-10  # config key tol.boundary
    support_tol: float = 1e-9  # config key tol.support
    solver_tol: float = 1e-8
    group_tol: float = 1e-8
    polar_margin: float = 1e-7
    sphere_samples: int = 8192
    mc_samples: int = 200_000
    mc_max_stderr: float = 5e-3
    seed: int = 7
    kernels: str = "auto"  # auto | compiled | python

    @classmethod
    def from_env(cls) -> "RunConfig":
        kwargs = {}
        for f in fields(cls):
            var = _ENV_MAP.get(f.name)
            if var and var in os.environ:
                raw = os.environ[var]
                kwargs[f.name] = f.type if False else _coerce(raw, f.default)
        return cls(**kwargs)


def _coerce(raw: str, default):
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    return raw


CONFIG = RunConfig.from_env()
