import math
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pidrate.controller import (
    ControllerConfig,
    ControllerState,
    RateController,
    k_i_from_phi,
    normalize_error,
    transfer,
    update,
    weight_error,
)
from pidrate.errors import ConfigError, TimeRegressionError
from pidrate.fixed import ONE, SCALE, ZERO, Fixed, fx

NO_INTEGRAL = ControllerConfig(k_i_fixed=ZERO)


def weights():
    return st.integers(min_value=1, max_value=SCALE - 1).map(Fixed)


def test_weight_error():
    assert weight_error(fx("0.5"), fx("0.5")) == ZERO
    assert weight_error(fx("0.7"), fx("0.5")) == fx("0.2")
    assert weight_error(fx("0.3"), fx("0.5")) == fx("-0.2")
    with pytest.raises(ValueError):
        weight_error(fx(1), fx("0.5"))
    with pytest.raises(ValueError):
        weight_error(ZERO, fx("0.5"))


@pytest.mark.parametrize(
    "e, w_r, expected",
    [("0", "0.3", "0"), ("0.2", "0.5", "0.4"), ("-0.15", "0.75", "-0.2"), ("0.125", "0.75", "0.5")],
)
def test_normalize_error(e, w_r, expected):
    assert normalize_error(fx(e), fx(w_r)) == fx(expected)


@given(weights(), st.integers(min_value=1, max_value=99).map(lambda p: fx(f"0.{p:02d}")))
def test_normalized_error_in_open_unit_interval(w, w_r):
    e = normalize_error(weight_error(w, w_r), w_r)
    assert -ONE <= e < ONE


def test_k_i_from_phi():
    assert k_i_from_phi(fx(4), fx("1.5")) == fx(2)
    assert k_i_from_phi(fx(4), ONE) == ZERO
    assert k_i_from_phi(fx(4), fx("0.9")) == ZERO


def test_transfer_examples():
    assert transfer(ZERO, fx("0.15")) == ZERO
    assert transfer(fx("0.4"), fx("0.15")) == fx("0.1")
    got = transfer(fx("-0.4"), fx("0.15"))
    oracle = Fraction(15, 100) * Fraction(-4, 10) / (1 - Fraction(-4, 10))
    assert got == Fixed.from_fraction(oracle)
    assert str(got) == "-0.042857142857142857"
    with pytest.raises(ValueError):
        transfer(ONE, fx("0.15"))


@given(st.integers(min_value=-(10**21), max_value=999_999 * 10**12), st.integers(min_value=-(10**21), max_value=999_999 * 10**12))
def test_transfer_monotone(a, b):
    if a == b:
        return
    lo, hi = sorted((Fixed(a), Fixed(b)), key=lambda f: f.raw)
    alpha = fx("0.15")
    if hi.raw - lo.raw > 10**6:  # well above fixed-point resolution of the ratio
        assert transfer(lo, alpha) < transfer(hi, alpha)
    else:
        assert transfer(lo, alpha) <= transfer(hi, alpha)


@given(st.integers(min_value=-(10**24), max_value=999_999 * 10**12))
def test_transfer_bounded_below(e):
    alpha = fx("0.15")
    assert transfer(Fixed(e), alpha) > -alpha


def test_transfer_asymptote_at_clamp():
    cfg = ControllerConfig()
    assert transfer(cfg.e_ctrl_max, cfg.alpha) > cfg.alpha * 100_000


def test_config_validation():
    with pytest.raises(ConfigError):
        ControllerConfig(w_r=ONE)
    with pytest.raises(ConfigError):
        ControllerConfig(alpha=ZERO)
    with pytest.raises(ConfigError):
        ControllerConfig(e_i_floor=fx("0.1"))
    with pytest.raises(ConfigError):
        ControllerConfig(e_ctrl_max=ONE)
    with pytest.raises(ConfigError):
        ControllerConfig(period=ZERO)


def test_first_update_at_reference_is_zero():
    _, out = update(ControllerState(), ControllerConfig(), fx("0.5"), ZERO, fx("1.5"))
    assert (out.e_raw, out.e_norm, out.e_p, out.e_i, out.e_d, out.e_ctrl, out.rate) == (ZERO,) * 7


def test_first_update_is_purely_proportional():
    state, out = update(ControllerState(), ControllerConfig(k_i_fixed=fx(5)), fx("0.7"), fx(3), fx("1.5"))
    assert out.e_i == ZERO and out.e_d == ZERO
    assert out.rate == fx("0.1")
    assert state.last_t == fx(3)


def test_same_timestamp_twice_is_idempotent():
    cfg = ControllerConfig()
    s1, out1 = update(ControllerState(), cfg, fx("0.7"), ZERO, fx("1.5"))
    s1, out1 = update(s1, cfg, fx("0.7"), fx("0.1"), fx("1.5"))
    s2, out2 = update(s1, cfg, fx("0.7"), fx("0.1"), fx("1.5"))
    assert out1 == out2
    assert s2.e_i_acc == s1.e_i_acc and s2.twce == s1.twce


def test_time_regression_rejected():
    s, _ = update(ControllerState(), ControllerConfig(), fx("0.6"), fx(1), fx("1.5"))
    with pytest.raises(TimeRegressionError):
        update(s, ControllerConfig(), fx("0.6"), fx("0.5"), fx("1.5"))


@pytest.mark.parametrize("dt", ["0.001368925393566051", "0.25", "1"])
def test_base_rate_without_integral(dt):
    ctl = RateController(NO_INTEGRAL)
    t = ZERO
    for _ in range(20):
        out = ctl.update(fx("0.7"), t, fx("1.5"))
        assert out.e_norm == fx("0.4")
        assert out.rate == fx("0.1")
        t = t + fx(dt)


@given(st.lists(st.integers(min_value=1, max_value=10**17), min_size=1, max_size=30), weights())
def test_twce_is_linear_in_elapsed_time(gaps, w):
    cfg = ControllerConfig()
    state, first = update(ControllerState(), cfg, w, ZERO, fx("1.5"))
    t = ZERO
    for g in gaps:
        t = t + Fixed(g)
        state, _ = update(state, cfg, w, t, fx("1.5"))
    exact = first.e_norm.to_fraction() * t.to_fraction()
    assert abs(state.twce.to_fraction() - exact) <= Fraction(len(gaps), SCALE)


def test_integrator_partition_invariance():
    cfg = ControllerConfig(phi=fx(4))
    w, ratio = fx("0.7"), fx("1.5")
    fine, _ = update(ControllerState(), cfg, w, ZERO, ratio)
    for k in range(1, 11):
        fine, _ = update(fine, cfg, w, fx(f"0.{k}") if k < 10 else ONE, ratio)
    coarse, _ = update(ControllerState(), cfg, w, ZERO, ratio)
    coarse, _ = update(coarse, cfg, w, ONE, ratio)
    assert abs(fine.e_i_acc.raw - coarse.e_i_acc.raw) <= 10
    assert coarse.e_i_acc == fx("0.8")


def test_integrator_floor_holds():
    cfg = ControllerConfig(k_i_fixed=fx(3), e_i_floor=fx("-0.25"))
    ctl = RateController(cfg)
    for k in range(200):
        out = ctl.update(fx("0.1"), fx(k) / 50, fx("1.5"))
        assert out.e_i >= cfg.e_i_floor
    assert ctl.state.e_i_acc == cfg.e_i_floor


@pytest.mark.parametrize("floor", ["-0.5", "-0.2", "0"])
def test_anti_windup_recovery_bound(floor):
    dt = fx("0.001368925393566051")
    cfg = ControllerConfig(k_i_fixed=fx("1.5"), e_i_floor=fx(floor))
    ctl = RateController(cfg)
    k = 0
    while k * dt.raw < ONE.raw:
        ctl.update(fx("0.3"), dt * k, fx("1.5"))
        k += 1
    bound = math.ceil(abs(float(cfg.e_i_floor)) / (0.4 * float(dt)))
    for n in range(1, max(bound, 1) + 1):
        out = ctl.update(fx("0.7"), dt * (k + n - 1), fx("1.5"))
        if out.e_ctrl > ZERO:
            break
    else:
        pytest.fail("controller error stayed non-positive past the anti-windup bound")
    if cfg.e_i_floor == ZERO:
        assert n == 1


def test_memoryless_without_integral_or_derivative():
    cfg = ControllerConfig(k_i_fixed=ZERO, k_d=ZERO)
    a, b = RateController(cfg), RateController(cfg)
    for k in range(30):
        a.update(fx("0.2") if k % 2 else fx("0.9"), fx(k), fx("1.3"))
    assert a.update(fx("0.63"), fx(31), fx("1.3")) == b.update(fx("0.63"), fx(0), fx("0.8"))


def test_derivative_needs_two_buckets():
    cfg = ControllerConfig(k_i_fixed=ZERO, k_d=fx(2), period=fx("0.1"))
    ctl = RateController(cfg)
    assert ctl.update(fx("0.7"), ZERO, fx("1.5")).e_d == ZERO
    assert ctl.state.bucket_count == 1
    assert ctl.update(fx("0.7"), fx("0.05"), fx("1.5")).e_d == ZERO
    out = ctl.update(fx("0.7"), fx("0.1"), fx("1.5"))
    assert ctl.state.bucket_count == 2
    assert out.e_d == fx("0.8")


@pytest.mark.parametrize("cadence", ["0.01", "0.03", "0.07", "0.2"])
def test_derivative_equals_gain_times_constant_error(cadence):
    cfg = ControllerConfig(k_i_fixed=ZERO, k_d=fx("0.5"), period=fx("0.1"))
    ctl = RateController(cfg)
    t = ZERO
    seen = []
    for _ in range(60):
        out = ctl.update(fx("0.3"), t, fx("1.5"))
        if ctl.state.bucket_count == 2:
            seen.append(out.e_d)
        t = t + fx(cadence)
    assert seen
    assert all(abs(v.raw - fx("-0.2").raw) <= 2 for v in seen)


def test_bucket_times_ordered():
    cfg = ControllerConfig(k_d=fx(1), period=fx("0.05"))
    ctl = RateController(cfg)
    for k in range(40):
        ctl.update(fx("0.55"), fx(k) / 37, fx("1.5"))
        s = ctl.state
        if s.bucket_count == 2:
            assert s.t_prev <= s.t_delayed <= s.last_t
            assert s.t_delayed - s.t_prev >= cfg.period


def test_clamp_applies():
    cfg = ControllerConfig(k_i_fixed=fx(100))
    ctl = RateController(cfg)
    ctl.update(fx("0.99"), ZERO, fx("1.5"))
    out = ctl.update(fx("0.99"), ONE, fx("1.5"))
    assert out.e_ctrl == cfg.e_ctrl_max
    assert out.rate == transfer(cfg.e_ctrl_max, cfg.alpha)


def test_rate_update_invariants():
    cfg = replace(ControllerConfig(), k_d=fx("0.3"), period=fx("0.02"))
    ctl = RateController(cfg)
    for k in range(100):
        w = fx("0.8") if (k // 10) % 2 else fx("0.35")
        out = ctl.update(w, fx(k) / 100, fx("1.4"))
        total = out.e_p + out.e_i + out.e_d
        assert out.e_ctrl == (total if total < cfg.e_ctrl_max else cfg.e_ctrl_max)
        assert out.rate == transfer(out.e_ctrl, cfg.alpha)
        assert out.e_p == out.e_norm
