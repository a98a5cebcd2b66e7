"""PID interest-rate controller driven by stablecoin pool weight.

Pipeline for one update::

    weight -> weight error -> normalized error E in (-1, 1)
           -> E_P = E                    (proportional gain fixed at 1)
           -> E_I += K_I * E * dt        (floored at e_i_floor)
           -> E_D  = K_D * slope of TWCE over the lookback buckets
           -> e_ctrl = min(E_P + E_I + E_D, e_ctrl_max)
           -> rate = alpha * e_ctrl / (1 - e_ctrl)

Time is measured in years; rates are annualized.

There is intentionally no proportional gain parameter: the transfer function
puts its asymptote at ``e_ctrl = 1``, and scaling E would move it. ``alpha``
does the job of a proportional gain instead.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from pidrate.errors import ConfigError, TimeRegressionError
from pidrate.fixed import ONE, ZERO, Fixed, div, fmax, fmin, fx, mul

DEFAULT_PERIOD = div(Fixed.from_int(7), Fixed.from_int(365))


@dataclass(frozen=True)
class ControllerConfig:
    w_r: Fixed = field(default_factory=lambda: fx("0.5"))
    alpha: Fixed = field(default_factory=lambda: fx("0.15"))
    phi: Fixed = field(default_factory=lambda: fx(4))
    k_i_fixed: Optional[Fixed] = None
    k_d: Fixed = ZERO
    period: Fixed = DEFAULT_PERIOD
    e_i_floor: Fixed = field(default_factory=lambda: fx("-0.5"))
    e_ctrl_max: Fixed = field(default_factory=lambda: fx("0.999999"))

    def __post_init__(self):
        if not (ZERO < self.w_r < ONE):
            raise ConfigError(f"w_r must lie in (0, 1), got {self.w_r}")
        if self.alpha <= ZERO:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        if self.period <= ZERO:
            raise ConfigError(f"period must be positive, got {self.period}")
        if self.e_i_floor > ZERO:
            raise ConfigError(f"e_i_floor must be <= 0, got {self.e_i_floor}")
        if not (ZERO < self.e_ctrl_max < ONE):
            raise ConfigError(f"e_ctrl_max must lie in (0, 1), got {self.e_ctrl_max}")
        if self.phi < ZERO:
            raise ConfigError(f"phi must be non-negative, got {self.phi}")


@dataclass(frozen=True)
class ControllerState:
    """Rolling controller memory.

    ``last_t`` is ``None`` until the first update. The two derivative
    buckets hold (TWCE, time) snapshots taken at least one period apart.
    """

    twce: Fixed = ZERO
    e_i_acc: Fixed = ZERO
    last_t: Optional[Fixed] = None
    twce_delayed: Fixed = ZERO
    t_delayed: Fixed = ZERO
    twce_prev: Fixed = ZERO
    t_prev: Fixed = ZERO
    bucket_count: int = 0


@dataclass(frozen=True)
class RateUpdate:
    e_raw: Fixed
    e_norm: Fixed
    e_p: Fixed
    e_i: Fixed
    e_d: Fixed
    e_ctrl: Fixed
    rate: Fixed


def _check_weight(w: Fixed) -> None:
    if not (ZERO < w < ONE):
        raise ValueError(f"pool weight must lie in (0, 1), got {w}")


def weight_error(w: Fixed, w_r: Fixed) -> Fixed:
    _check_weight(w)
    return w - w_r


def normalize_error(e: Fixed, w_r: Fixed) -> Fixed:
    """Map (-w_r, 0] onto (-1, 0] and (0, 1 - w_r) onto (0, 1)."""
    if e <= ZERO:
        return div(e, w_r)
    return div(e, ONE - w_r)


def k_i_from_phi(phi: Fixed, tcr_mcr: Fixed) -> Fixed:
    # floored: below full leverage the integrator must not reward imbalance
    return fmax(ZERO, mul(phi, tcr_mcr - ONE))


def transfer(e_ctrl: Fixed, alpha: Fixed) -> Fixed:
    if e_ctrl >= ONE:
        raise ValueError(f"transfer is undefined for e_ctrl >= 1, got {e_ctrl}")
    return div(mul(alpha, e_ctrl), ONE - e_ctrl)


def update(
    state: ControllerState,
    cfg: ControllerConfig,
    w: Fixed,
    t: Fixed,
    tcr_mcr: Fixed,
) -> tuple[ControllerState, RateUpdate]:
    """Advance the controller to time ``t`` with pool weight ``w``.

    Returns the new state and the breakdown of the rate it produced. The
    integral gain is ``cfg.k_i_fixed`` when set, otherwise derived from
    ``cfg.phi`` and the current ``tcr_mcr``.
    """
    if state.last_t is not None and t < state.last_t:
        raise TimeRegressionError(f"update at t={t} precedes last update at t={state.last_t}")
    e_raw = weight_error(w, cfg.w_r)
    e_norm = normalize_error(e_raw, cfg.w_r)
    dt = ZERO if state.last_t is None else t - state.last_t

    k_i = cfg.k_i_fixed if cfg.k_i_fixed is not None else k_i_from_phi(cfg.phi, tcr_mcr)
    step = mul(e_norm, dt)
    twce = state.twce + step
    e_i_acc = fmax(state.e_i_acc + mul(mul(k_i, e_norm), dt), cfg.e_i_floor)

    twce_delayed, t_delayed = state.twce_delayed, state.t_delayed
    twce_prev, t_prev = state.twce_prev, state.t_prev
    buckets = state.bucket_count
    if buckets == 0:
        twce_delayed, t_delayed, buckets = twce, t, 1
    elif t - t_delayed >= cfg.period:
        twce_prev, t_prev = twce_delayed, t_delayed
        twce_delayed, t_delayed = twce, t
        buckets = 2
    if buckets == 2:
        e_d = mul(cfg.k_d, div(twce_delayed - twce_prev, t_delayed - t_prev))
    else:
        e_d = ZERO

    e_ctrl = fmin(e_norm + e_i_acc + e_d, cfg.e_ctrl_max)
    rate = transfer(e_ctrl, cfg.alpha)

    new_state = replace(
        state,
        twce=twce,
        e_i_acc=e_i_acc,
        last_t=t,
        twce_delayed=twce_delayed,
        t_delayed=t_delayed,
        twce_prev=twce_prev,
        t_prev=t_prev,
        bucket_count=buckets,
    )
    return new_state, RateUpdate(e_raw, e_norm, e_norm, e_i_acc, e_d, e_ctrl, rate)


class RateController:
    """Stateful convenience wrapper around :func:`update`.

    Not thread safe; one writer per instance.
    """

    def __init__(self, cfg: ControllerConfig, state: ControllerState | None = None):
        self.cfg = cfg
        self.state = state or ControllerState()

    def update(self, w: Fixed, t: Fixed, tcr_mcr: Fixed) -> RateUpdate:
        self.state, out = update(self.state, self.cfg, w, t, tcr_mcr)
        return out
