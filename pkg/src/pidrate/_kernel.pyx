# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled simulation step loop on signed 128-bit fixed point.

Same contract as :func:`pidrate._pykernel.run_steps`; the two must agree
bit for bit.
"""
from libc.stdint cimport int64_t, uint64_t

from pidrate.errors import FixedOverflowError


cdef extern from "_fixed128.h":
    ctypedef long long fx_i128 "__int128"
    int fx_mul(fx_i128 a, fx_i128 b, fx_i128 *out) nogil
    int fx_div(fx_i128 a, fx_i128 b, fx_i128 *out) nogil
    int fx_add(fx_i128 a, fx_i128 b, fx_i128 *out) nogil
    int fx_sub(fx_i128 a, fx_i128 b, fx_i128 *out) nogil


cdef object _MASK64 = (1 << 64) - 1
cdef object _RAW_MAX = (1 << 127) - 1
cdef object _RAW_MIN = -(1 << 127)


cdef fx_i128 _to_c(object x) except *:
    if x > _RAW_MAX or x < _RAW_MIN:
        raise FixedOverflowError(f"fixed-point overflow: raw value {x} outside int128")
    cdef int64_t hi = x >> 64
    cdef uint64_t lo = x & _MASK64
    return (<fx_i128>hi << 64) | <fx_i128>lo


cdef object _to_py(fx_i128 v):
    cdef int64_t hi = <int64_t>(v >> 64)
    cdef uint64_t lo = <uint64_t>v
    return (<object>hi << 64) | <object>lo


cdef inline int _chk(int status) except -1:
    if status != 0:
        raise FixedOverflowError("fixed-point overflow in compiled kernel")
    return 0


def run_steps(weights, dt, initial_ratio, initial_debt, cfg, bint record=True):
    """Run the controller/accrual loop over precomputed per-step weights.

    ``cfg`` is the tuple produced by :func:`pidrate.kernel.config_raw`.
    Returns ``(columns, terminated, t_terminal)`` with raw integers.
    """
    cdef fx_i128 one = 1000000000000000000
    cdef fx_i128 c_dt = _to_c(dt)
    cdef fx_i128 w_r = _to_c(cfg[0])
    cdef fx_i128 alpha = _to_c(cfg[1])
    cdef fx_i128 phi = _to_c(cfg[2])
    cdef bint has_ki = cfg[3] is not None
    cdef fx_i128 ki_fixed = _to_c(cfg[3]) if has_ki else 0
    cdef fx_i128 k_d = _to_c(cfg[4])
    cdef fx_i128 period = _to_c(cfg[5])
    cdef fx_i128 floor = _to_c(cfg[6])
    cdef fx_i128 e_max = _to_c(cfg[7])

    cdef fx_i128 tcr = _to_c(initial_ratio)
    cdef fx_i128 debt = _to_c(initial_debt)
    cdef fx_i128 twce = 0, e_i_acc = 0, last_t = 0
    cdef fx_i128 twce_delayed = 0, t_delayed = 0, twce_prev = 0, t_prev = 0
    cdef int buckets = 0
    cdef fx_i128 t = 0, w, e_raw, e_norm, step_dt, k_i, tmp, tmp2, e_d, e_ctrl, rate
    cdef fx_i128 factor, tcr_before, offset
    cdef Py_ssize_t k, n = len(weights)
    cdef bint terminated = False
    t_terminal = None

    cols = None
    if record:
        cols = {name: [] for name in
                ("t", "w", "e_norm", "e_i", "e_d", "e_ctrl", "rate", "tcr_mcr", "debt")}

    for k in range(n):
        w = _to_c(weights[k])
        if k > 0:
            _chk(fx_add(t, c_dt, &t))
        # normalized error
        _chk(fx_sub(w, w_r, &e_raw))
        if e_raw <= 0:
            _chk(fx_div(e_raw, w_r, &e_norm))
        else:
            _chk(fx_sub(one, w_r, &tmp))
            _chk(fx_div(e_raw, tmp, &e_norm))
        step_dt = 0 if k == 0 else t - last_t
        # integral gain
        if has_ki:
            k_i = ki_fixed
        else:
            _chk(fx_sub(tcr, one, &tmp))
            _chk(fx_mul(phi, tmp, &k_i))
            if k_i < 0:
                k_i = 0
        _chk(fx_mul(e_norm, step_dt, &tmp))
        _chk(fx_add(twce, tmp, &twce))
        _chk(fx_mul(k_i, e_norm, &tmp))
        _chk(fx_mul(tmp, step_dt, &tmp))
        _chk(fx_add(e_i_acc, tmp, &e_i_acc))
        if e_i_acc < floor:
            e_i_acc = floor
        # derivative buckets
        if buckets == 0:
            twce_delayed = twce
            t_delayed = t
            buckets = 1
        else:
            _chk(fx_sub(t, t_delayed, &tmp))
            if tmp >= period:
                twce_prev = twce_delayed
                t_prev = t_delayed
                twce_delayed = twce
                t_delayed = t
                buckets = 2
        if buckets == 2:
            _chk(fx_sub(twce_delayed, twce_prev, &tmp))
            _chk(fx_sub(t_delayed, t_prev, &tmp2))
            _chk(fx_div(tmp, tmp2, &tmp))
            _chk(fx_mul(k_d, tmp, &e_d))
        else:
            e_d = 0
        _chk(fx_add(e_norm, e_i_acc, &e_ctrl))
        _chk(fx_add(e_ctrl, e_d, &e_ctrl))
        if e_ctrl > e_max:
            e_ctrl = e_max
        _chk(fx_mul(alpha, e_ctrl, &tmp))
        _chk(fx_sub(one, e_ctrl, &tmp2))
        _chk(fx_div(tmp, tmp2, &rate))
        last_t = t
        # accrual
        _chk(fx_mul(rate, c_dt, &tmp))
        _chk(fx_add(one, tmp, &factor))
        if factor <= 0:
            raise ValueError("rate would wipe out the debt in one step")
        tcr_before = tcr
        _chk(fx_div(tcr, factor, &tcr))
        _chk(fx_mul(debt, factor, &debt))

        if record:
            cols["t"].append(_to_py(t))
            cols["w"].append(_to_py(w))
            cols["e_norm"].append(_to_py(e_norm))
            cols["e_i"].append(_to_py(e_i_acc))
            cols["e_d"].append(_to_py(e_d))
            cols["e_ctrl"].append(_to_py(e_ctrl))
            cols["rate"].append(_to_py(rate))
            cols["tcr_mcr"].append(_to_py(tcr))
            cols["debt"].append(_to_py(debt))

        if tcr <= one:
            terminated = True
            offset = c_dt
            if rate > 0:
                _chk(fx_sub(tcr_before, one, &tmp))
                _chk(fx_div(tmp, rate, &offset))
                if offset < 0:
                    offset = 0
                elif offset > c_dt:
                    offset = c_dt
            elif tcr_before <= one:
                offset = 0
            _chk(fx_add(t, offset, &tmp))
            t_terminal = _to_py(tmp)
            break

    return cols, terminated, t_terminal


def mul_raw(a, b):
    """C fixed-point multiply on raw integers (exposed for cross-checking)."""
    cdef fx_i128 out
    _chk(fx_mul(_to_c(a), _to_c(b), &out))
    return _to_py(out)


def div_raw(a, b):
    """C fixed-point divide on raw integers (exposed for cross-checking)."""
    cdef fx_i128 out
    if b == 0:
        raise ZeroDivisionError("fixed-point division by zero")
    _chk(fx_div(_to_c(a), _to_c(b), &out))
    return _to_py(out)
