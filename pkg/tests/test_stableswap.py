from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pidrate import reference
from pidrate.errors import PoolError
from pidrate.fixed import ONE, Fixed, div, fx
from pidrate.stableswap import (
    Direction,
    PoolState,
    apply_swap,
    balances_at_weight,
    counter_weight,
    get_dy,
    invariant_d,
    price_curve,
    spot_price,
    weight,
)

BASE = PoolState(fx(100), fx(1_000_000), fx(1_000_000))


def exact_residual(amp: Fixed, x: Fixed, y: Fixed, d: Fixed) -> Fraction:
    """|F(x, y, D)| / D in exact rational arithmetic (Ann = 2 * amp)."""
    ann = 2 * amp.to_fraction()
    X, Y, D = x.to_fraction(), y.to_fraction(), d.to_fraction()
    f = ann * (X + Y) + D - ann * D - D**3 / (4 * X * Y)
    return abs(f) / D


def rel(a, b) -> float:
    return abs(float(a) - float(b)) / abs(float(b))


def test_balanced_pool_d_is_sum():
    assert invariant_d(BASE) == fx(2_000_000)


def test_base_swap_output():
    dy = get_dy(BASE, fx(400_000))
    assert rel(dy, 398_132) <= 1e-3
    assert rel(dy, reference.pool_get_dy(100.0, 1e6, 1e6, 4e5)) <= 1e-9


def test_base_swap_weight_and_value_preservation():
    pool = apply_swap(BASE, fx(400_000))
    assert abs(float(weight(pool)) - 0.70) <= 0.005
    assert weight(pool) + counter_weight(pool) == ONE
    d = invariant_d(pool)
    assert rel(d, 2_000_000) <= 1e-12
    assert exact_residual(pool.amp, pool.bal_stable, pool.bal_counter, d) <= Fraction(1, 10**12)


def test_base_swap_average_price():
    # 400,000 in for ~398,132 out: an execution price of ~0.995
    dy = get_dy(BASE, fx(400_000))
    assert abs(float(div(dy, fx(400_000))) - 0.995) <= 0.001


def test_base_swap_spot_price_matches_float_oracle():
    pool = apply_swap(BASE, fx(400_000))
    p = spot_price(pool)
    assert rel(p, reference.pool_spot_price(100.0, float(pool.bal_stable), float(pool.bal_counter))) <= 1e-9
    assert p < ONE


def test_spec_example_state_weight():
    pool = PoolState(fx(100), fx(1_400_000), fx(601_868))
    assert abs(float(weight(pool)) - 0.6994) <= 1e-4
    assert rel(invariant_d(pool), 2_000_000) <= 1e-6


def test_large_amp_approaches_constant_sum():
    pool = PoolState(fx(10**9), fx(1_000_000), fx(300_000))
    assert rel(invariant_d(pool), 1_300_000) <= 1e-6


def test_balanced_spot_price_is_one():
    assert spot_price(BASE) == ONE
    assert spot_price(PoolState(fx(7), fx(5), fx(5))) == ONE


def test_small_swap_price_near_spot_at_balance():
    dy = get_dy(BASE, fx("0.001"))
    assert rel(div(dy, fx("0.001")), 1) <= 1e-6


def test_zero_or_negative_swap_rejected():
    with pytest.raises(PoolError):
        apply_swap(BASE, Fixed(0))
    with pytest.raises(PoolError):
        get_dy(BASE, fx(-1))


def test_invalid_pool_rejected():
    with pytest.raises(PoolError):
        PoolState(fx(100), Fixed(0), fx(1))
    with pytest.raises(PoolError):
        PoolState(Fixed(0), fx(1), fx(1))


def test_opposite_swaps_keep_invariant():
    pool = apply_swap(BASE, fx(250_000), Direction.STABLE_IN)
    back = apply_swap(pool, fx(250_000), Direction.STABLE_OUT)
    for p in (pool, back):
        assert exact_residual(p.amp, p.bal_stable, p.bal_counter, invariant_d(p)) <= Fraction(1, 10**12)


def test_stable_out_direction_mirrors():
    mirrored = PoolState(fx(100), fx(1_000_000), fx(1_000_000))
    assert get_dy(mirrored, fx(400_000), Direction.STABLE_OUT) == get_dy(mirrored, fx(400_000))
    pool = apply_swap(BASE, fx(400_000), Direction.STABLE_OUT)
    assert weight(pool) < fx("0.31")


def test_get_dy_increasing_and_concave():
    grid = [fx(10_000 * k) for k in range(1, 60)]
    outs = [get_dy(BASE, dx) for dx in grid]
    steps = [b - a for a, b in zip(outs, outs[1:])]
    assert all(s > Fixed(0) for s in steps)
    assert all(b < a for a, b in zip(steps, steps[1:]))


@pytest.mark.parametrize("stable, counter", [(1_000_000, 1_000_000), (1_400_000, 601_868), (300_000, 900_000)])
def test_execution_no_better_than_spot(stable, counter):
    pool = PoolState(fx(100), fx(stable), fx(counter))
    p = spot_price(pool)
    for k in range(1, 20):
        dx = fx(500 * k)
        assert get_dy(pool, dx) <= (dx * p) + Fixed(2)


@pytest.mark.parametrize("amp, stable, counter", [(100, 1_000_000, 1_000_000), (100, 1_400_000, 601_868), (10, 2_000, 7_000), (2000, 5e5, 1.5e6)])
def test_spot_price_is_finite_difference_limit(amp, stable, counter):
    pool = PoolState(fx(amp), fx(int(stable)), fx(int(counter)))
    d = invariant_d(pool)
    dx = Fixed(max(1, d.raw // 10**6))
    secant = div(get_dy(pool, dx), dx)
    assert rel(secant, spot_price(pool)) <= 1e-6


def test_price_side_of_one_tracks_weight():
    for w_pct in range(5, 96, 5):
        w = fx(f"0.{w_pct:02d}")
        x, y = balances_at_weight(fx(100), fx(2_000_000), w)
        pool = PoolState(fx(100), x, y)
        dx = fx(1)
        fd_price = div(get_dy(pool, dx), dx)
        if w_pct > 50:
            assert fd_price < ONE
        elif w_pct < 50:
            assert fd_price > ONE


def test_price_curve_shape():
    weights = [fx(f"0.{k:02d}") for k in range(5, 96)]
    curve = price_curve(fx(100), fx(2_000_000), weights)
    prices = [p for _, p in curve]
    assert dict(curve)[fx("0.5")] == ONE
    assert all(b < a for a, b in zip(prices, prices[1:]))
    for w, _ in curve:
        x, y = balances_at_weight(fx(100), fx(2_000_000), w)
        assert abs(float(div(x, x + y)) - float(w)) <= 1e-15
        assert exact_residual(fx(100), x, y, fx(2_000_000)) <= Fraction(1, 10**12)


def test_price_curve_at_base_weight_matches_pool():
    (_, p), = price_curve(fx(100), fx(2_000_000), [fx("0.7")])
    x, y = balances_at_weight(fx(100), fx(2_000_000), fx("0.7"))
    assert rel(p, reference.pool_spot_price(100.0, float(x), float(y))) <= 1e-9


def test_higher_amp_is_flatter():
    (_, p100), = price_curve(fx(100), fx(2_000_000), [fx("0.7")])
    (_, p1000), = price_curve(fx(1000), fx(2_000_000), [fx("0.7")])
    assert abs(1 - float(p1000)) < abs(1 - float(p100))


def test_price_curve_rejects_bad_weight():
    with pytest.raises(PoolError):
        price_curve(fx(100), fx(2_000_000), [fx(1)])


pools = st.tuples(
    st.integers(min_value=1, max_value=5000),
    st.integers(min_value=1_000, max_value=10_000_000),
    st.integers(min_value=1_000, max_value=10_000_000),
).filter(lambda t: max(t[1], t[2]) <= 20 * min(t[1], t[2]))


@given(pools, st.integers(min_value=1, max_value=50))
def test_fixed_matches_float_reference(pool_args, pct):
    amp, x, y = pool_args
    pool = PoolState(fx(amp), fx(x), fx(y))
    dx = fx(max(1, x * pct // 100))
    d = invariant_d(pool)
    assert rel(d, reference.pool_d(amp, x, y)) <= 1e-9
    assert rel(spot_price(pool), reference.pool_spot_price(amp, x, y)) <= 1e-9
    assert rel(get_dy(pool, dx), reference.pool_get_dy(amp, x, y, float(dx))) <= 1e-9
    after = apply_swap(pool, dx)
    assert exact_residual(after.amp, after.bal_stable, after.bal_counter, invariant_d(after)) <= Fraction(1, 10**12)
