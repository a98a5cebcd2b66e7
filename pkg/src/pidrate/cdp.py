"""Aggregate CDP system leverage under interest accrual.

Only the TCR/MCR ratio and total debt are tracked. Collateral value is held
constant, so accruing interest raises debt and lowers the ratio by the same
factor ``1 + rate * dt``.
"""
from __future__ import annotations

from dataclasses import dataclass

from pidrate.errors import ConfigError
from pidrate.fixed import ONE, ZERO, Fixed, div, mul


@dataclass(frozen=True)
class CdpSystemState:
    tcr_mcr: Fixed
    debt: Fixed

    def __post_init__(self):
        if self.debt <= ZERO:
            raise ConfigError(f"debt must be positive, got {self.debt}")
        if self.tcr_mcr < ZERO:
            raise ConfigError(f"tcr_mcr must be non-negative, got {self.tcr_mcr}")


def growth_factor(rate: Fixed, dt: Fixed) -> Fixed:
    factor = ONE + mul(rate, dt)
    if factor <= ZERO:
        raise ValueError(f"rate {rate} over dt {dt} would wipe out the debt in one step")
    return factor


def accrue(state: CdpSystemState, rate: Fixed, dt: Fixed) -> CdpSystemState:
    """Simple compounding over one step of length ``dt`` years."""
    factor = growth_factor(rate, dt)
    return CdpSystemState(tcr_mcr=div(state.tcr_mcr, factor), debt=mul(state.debt, factor))


def is_fully_levered(state: CdpSystemState) -> bool:
    return state.tcr_mcr <= ONE
