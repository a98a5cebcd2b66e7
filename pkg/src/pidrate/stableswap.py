"""Two-token StableSwap pool, fee free, in fixed point.

The invariant, with ``Ann`` the coefficient on ``n**n``::

    Ann * (x + y) + D = Ann * D + D**3 / (4 * x * y)

``amp`` follows the Curve pool-parameter convention: a pool configured with
``A = 100`` has ``Ann = A * n = 200``. This is the reading under which a
400,000 swap into a balanced 1,000,000 / 1,000,000 pool returns 398,132.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from pidrate.errors import ConvergenceError, PoolError
from pidrate.fixed import ONE, ZERO, Fixed, div, mul, mul_div

N_COINS = 2
MAX_ITER = 255


class Direction(str, Enum):
    STABLE_IN = "stable-in"
    STABLE_OUT = "stable-out"


@dataclass(frozen=True)
class PoolState:
    amp: Fixed
    bal_stable: Fixed
    bal_counter: Fixed

    def __post_init__(self):
        if self.amp <= ZERO:
            raise PoolError(f"amplification must be positive, got {self.amp}")
        if self.bal_stable <= ZERO or self.bal_counter <= ZERO:
            raise PoolError("pool balances must be strictly positive")

    @property
    def n(self) -> int:
        return N_COINS

    @property
    def ann(self) -> Fixed:
        return self.amp * N_COINS


def _d_p(d: Fixed, x: Fixed, y: Fixed) -> Fixed:
    # D**3 / (4xy), built up one balance at a time to keep magnitudes near D
    dp = mul_div(d, d, x * N_COINS)
    return mul_div(dp, d, y * N_COINS)


def _solve_d(ann: Fixed, x: Fixed, y: Fixed) -> Fixed:
    s = x + y
    d = s
    for _ in range(MAX_ITER):
        dp = _d_p(d, x, y)
        d_prev = d
        den = mul(ann - ONE, d) + dp * (N_COINS + 1)
        d = mul_div(ann * s + dp * N_COINS, d, den)
        if abs(d.raw - d_prev.raw) <= 1:
            return d
    raise ConvergenceError(f"invariant D did not converge for balances ({x}, {y})")


def _solve_y(ann: Fixed, x: Fixed, d: Fixed) -> Fixed:
    """Balance of the other token that keeps the invariant at ``d`` given ``x``."""
    c = mul_div(d, d, x * N_COINS)
    c = mul_div(c, d, ann * N_COINS)
    b = x + div(d, ann) - d
    y = d
    for _ in range(MAX_ITER):
        y_prev = y
        y = div(mul(y, y) + c, y * 2 + b)
        if abs(y.raw - y_prev.raw) <= 1:
            return y
    raise ConvergenceError(f"output balance did not converge for x={x}, D={d}")


def invariant_d(pool: PoolState) -> Fixed:
    return _solve_d(pool.ann, pool.bal_stable, pool.bal_counter)


def invariant_residual(pool: PoolState, d: Fixed | None = None) -> Fixed:
    """|F(x, y, D)| / D evaluated in fixed point."""
    if d is None:
        d = invariant_d(pool)
    ann = pool.ann
    f = mul(ann, pool.bal_stable + pool.bal_counter) + d - mul(ann, d) - _d_p(d, pool.bal_stable, pool.bal_counter)
    return div(abs(f), d)


def _sides(pool: PoolState, direction: Direction) -> tuple[Fixed, Fixed]:
    if Direction(direction) is Direction.STABLE_IN:
        return pool.bal_stable, pool.bal_counter
    return pool.bal_counter, pool.bal_stable


def get_dy(pool: PoolState, dx: Fixed, direction: Direction = Direction.STABLE_IN) -> Fixed:
    """Output amount for ``dx`` of input, at unchanged D.

    With ``stable-in`` the input is the stablecoin and the output is the
    counterasset; ``stable-out`` is the reverse.
    """
    if dx <= ZERO:
        raise PoolError(f"swap input must be positive, got {dx}")
    x, y = _sides(pool, direction)
    d = invariant_d(pool)
    y_new = _solve_y(pool.ann, x + dx, d)
    if y_new <= ZERO or y_new >= y:
        raise PoolError("swap would drain the pool")
    return y - y_new


def apply_swap(pool: PoolState, dx: Fixed, direction: Direction = Direction.STABLE_IN) -> PoolState:
    dy = get_dy(pool, dx, direction)
    if Direction(direction) is Direction.STABLE_IN:
        return PoolState(pool.amp, pool.bal_stable + dx, pool.bal_counter - dy)
    return PoolState(pool.amp, pool.bal_stable - dy, pool.bal_counter + dx)


def _price_at(ann: Fixed, d: Fixed, x: Fixed, y: Fixed) -> Fixed:
    dp = _d_p(d, x, y)
    return div(ann + div(dp, x), ann + div(dp, y))


def spot_price(pool: PoolState) -> Fixed:
    """Marginal price of the stablecoin in counterasset units, |dy/dx|."""
    d = invariant_d(pool)
    return _price_at(pool.ann, d, pool.bal_stable, pool.bal_counter)


def weight(pool: PoolState) -> Fixed:
    """Share of the pool held in the stablecoin."""
    return div(pool.bal_stable, pool.bal_stable + pool.bal_counter)


def counter_weight(pool: PoolState) -> Fixed:
    return ONE - weight(pool)


def balances_at_weight(amp: Fixed, d: Fixed, w: Fixed) -> tuple[Fixed, Fixed]:
    """Balances on the invariant surface for ``d`` whose stable share is ``w``.

    Newton on the pool size ``s`` with ``x = w*s``, ``y = (1-w)*s``; the
    invariant is increasing in ``s`` so the iteration is well behaved.
    """
    if not (ZERO < w < ONE):
        raise PoolError(f"weight must lie in (0, 1), got {w}")
    ann = amp * N_COINS
    wc = ONE - w
    s = d
    for _ in range(MAX_ITER):
        x, y = mul(w, s), mul(wc, s)
        if x <= ZERO or y <= ZERO:
            raise ConvergenceError(f"pool size collapsed while solving weight {w}")
        dp = _d_p(d, x, y)
        g = mul(ann, s) - dp - mul(ann - ONE, d)
        g_prime = ann + div(dp * 2, s)
        s_prev = s
        s = s - div(g, g_prime)
        if s <= ZERO:
            s = div(s_prev, Fixed.from_int(2))
        if abs(s.raw - s_prev.raw) <= 1:
            return mul(w, s), mul(wc, s)
    raise ConvergenceError(f"pool size did not converge for weight {w}")


def price_curve(amp: Fixed, d: Fixed, weights: list[Fixed]) -> list[tuple[Fixed, Fixed]]:
    """(weight, spot price) pairs along the invariant at fixed D."""
    ann = amp * N_COINS
    rows = []
    for w in weights:
        x, y = balances_at_weight(amp, d, w)
        rows.append((w, _price_at(ann, d, x, y)))
    return rows
