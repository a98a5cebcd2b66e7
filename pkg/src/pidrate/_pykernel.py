"""Pure-Python step loop, used when the compiled kernel is unavailable.

It drives :func:`pidrate.controller.update` and :func:`pidrate.cdp.accrue`
directly, so it doubles as the readable definition the compiled kernel has
to reproduce.
"""
from __future__ import annotations

from pidrate.cdp import CdpSystemState, accrue
from pidrate.controller import ControllerConfig, ControllerState, update
from pidrate.fixed import ONE, ZERO, Fixed, div, fmax, fmin

COLUMNS = ("t", "w", "e_norm", "e_i", "e_d", "e_ctrl", "rate", "tcr_mcr", "debt")


def _cfg_from_raw(cfg) -> ControllerConfig:
    w_r, alpha, phi, k_i_fixed, k_d, period, floor, e_max = cfg
    return ControllerConfig(
        w_r=Fixed(w_r),
        alpha=Fixed(alpha),
        phi=Fixed(phi),
        k_i_fixed=None if k_i_fixed is None else Fixed(k_i_fixed),
        k_d=Fixed(k_d),
        period=Fixed(period),
        e_i_floor=Fixed(floor),
        e_ctrl_max=Fixed(e_max),
    )


def run_steps(weights, dt, initial_ratio, initial_debt, cfg, record=True):
    controller_cfg = _cfg_from_raw(cfg)
    step = Fixed(dt)
    state = ControllerState()
    system = CdpSystemState(tcr_mcr=Fixed(initial_ratio), debt=Fixed(initial_debt))
    cols = {name: [] for name in COLUMNS} if record else None
    terminated = False
    t_terminal = None

    for k, w_raw in enumerate(weights):
        t = Fixed(k * dt)
        w = Fixed(w_raw)
        state, out = update(state, controller_cfg, w, t, system.tcr_mcr)
        before = system.tcr_mcr
        system = accrue(system, out.rate, step)
        if record:
            for name, value in zip(
                COLUMNS,
                (t, w, out.e_norm, out.e_i, out.e_d, out.e_ctrl, out.rate, system.tcr_mcr, system.debt),
            ):
                cols[name].append(value.raw)
        if system.tcr_mcr <= ONE:
            terminated = True
            offset = step
            if out.rate > ZERO:
                offset = fmin(fmax(div(before - ONE, out.rate), ZERO), step)
            elif before <= ONE:
                offset = ZERO
            t_terminal = (t + offset).raw
            break

    return cols, terminated, t_terminal
