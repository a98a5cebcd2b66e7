"""Backend selection for the simulation step loop.

The compiled kernel is used when it imports; otherwise the pure-Python loop
takes over. Set ``PIDRATE_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from pidrate import _pykernel
from pidrate.controller import ControllerConfig

try:
    from pidrate import _kernel as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _pykernel.run_steps}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled.run_steps

if _compiled is not None and os.environ.get("PIDRATE_PURE_PYTHON", "") in ("", "0"):
    BACKEND = "compiled"
else:
    BACKEND = "python"


def config_raw(cfg: ControllerConfig) -> tuple:
    return (
        cfg.w_r.raw,
        cfg.alpha.raw,
        cfg.phi.raw,
        None if cfg.k_i_fixed is None else cfg.k_i_fixed.raw,
        cfg.k_d.raw,
        cfg.period.raw,
        cfg.e_i_floor.raw,
        cfg.e_ctrl_max.raw,
    )


def run_steps(weights, dt, initial_ratio, initial_debt, cfg, record=True, backend=None):
    fn = BACKENDS[backend or BACKEND]
    return fn(weights, dt, initial_ratio, initial_debt, cfg, record)
