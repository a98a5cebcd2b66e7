"""Plain floating-point reference implementations.

Independent of the fixed-point code paths and of each other's helpers; used
to cross-check the deterministic kernel. Not meant for production use.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence


def pool_d(amp: float, x: float, y: float, iters: int = 255) -> float:
    ann = 2.0 * amp
    s = x + y
    d = s
    for _ in range(iters):
        d_prev = d
        dp = d * d * d / (4.0 * x * y)
        d = (ann * s + 2.0 * dp) * d / ((ann - 1.0) * d + 3.0 * dp)
        if abs(d - d_prev) <= 1e-12 * d:
            break
    return d


def pool_y(amp: float, x: float, d: float, iters: int = 255) -> float:
    ann = 2.0 * amp
    c = d * d * d / (4.0 * x * ann)
    b = x + d / ann - d
    y = d
    for _ in range(iters):
        y_prev = y
        y = (y * y + c) / (2.0 * y + b)
        if abs(y - y_prev) <= 1e-12 * d:
            break
    return y


def pool_get_dy(amp: float, x: float, y: float, dx: float) -> float:
    d = pool_d(amp, x, y)
    return y - pool_y(amp, x + dx, d)


def pool_spot_price(amp: float, x: float, y: float) -> float:
    ann = 2.0 * amp
    d = pool_d(amp, x, y)
    d3 = d * d * d
    return (ann + d3 / (4.0 * x * x * y)) / (ann + d3 / (4.0 * x * y * y))


@dataclass
class FloatConfig:
    w_r: float = 0.5
    alpha: float = 0.15
    phi: float = 4.0
    k_i_fixed: Optional[float] = None
    k_d: float = 0.0
    period: float = 7.0 / 365.0
    e_i_floor: float = -0.5
    e_ctrl_max: float = 1.0 - 1e-6


@dataclass
class FloatRun:
    rates: list
    tcr_mcr: list
    terminated: bool


def run_float(
    weights: Sequence[float],
    dt: float,
    initial_ratio: float,
    cfg: FloatConfig,
    times: Optional[Sequence[float]] = None,
) -> FloatRun:
    """Controller + accrual loop in double precision.

    ``times`` defaults to ``k * dt``; pass the exact grid when comparing
    against a fixed-point run whose timestep is not a binary fraction.
    """
    if times is None:
        times = [k * dt for k in range(len(weights))]
    twce = 0.0
    acc = 0.0
    tcr = initial_ratio
    last_t = None
    delayed = prev = None  # (twce, t)
    rates, ratios = [], []
    for w, t in zip(weights, times):
        e = w - cfg.w_r
        e_norm = e / cfg.w_r if e <= 0 else e / (1.0 - cfg.w_r)
        step = 0.0 if last_t is None else t - last_t
        last_t = t
        if cfg.k_i_fixed is not None:
            k_i = cfg.k_i_fixed
        else:
            k_i = max(0.0, cfg.phi * (tcr - 1.0))
        twce += e_norm * step
        acc = max(acc + k_i * e_norm * step, cfg.e_i_floor)
        if delayed is None:
            delayed = (twce, t)
        elif t - delayed[1] >= cfg.period:
            prev, delayed = delayed, (twce, t)
        e_d = cfg.k_d * (delayed[0] - prev[0]) / (delayed[1] - prev[1]) if prev is not None else 0.0
        e_ctrl = min(e_norm + acc + e_d, cfg.e_ctrl_max)
        rate = cfg.alpha * e_ctrl / (1.0 - e_ctrl)
        tcr = tcr / (1.0 + rate * dt)
        rates.append(rate)
        ratios.append(tcr)
        if tcr <= 1.0:
            return FloatRun(rates, ratios, True)
    return FloatRun(rates, ratios, False)
