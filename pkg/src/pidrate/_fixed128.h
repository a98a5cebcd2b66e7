/* Signed 128-bit fixed-point arithmetic, 18 fractional decimal digits.
 *
 * Products and quotients are formed in 256 bits and rounded to nearest,
 * ties away from zero, matching pidrate.fixed exactly. Every function
 * returns 0 on success and -1 on overflow or division by zero.
 */
#ifndef PIDRATE_FIXED128_H
#define PIDRATE_FIXED128_H

#include <stdint.h>

typedef __int128 fx_i128;
typedef unsigned __int128 fx_u128;

#define FX_SCALE_U64 1000000000000000000ULL
#define FX_MAX ((fx_i128)(((fx_u128)1 << 127) - 1))
#define FX_MIN (-FX_MAX - 1)

static inline fx_u128 fx_uabs(fx_i128 a) {
    return a < 0 ? (fx_u128)0 - (fx_u128)a : (fx_u128)a;
}

/* 128 x 128 -> 256 unsigned, as four 64-bit limbs, least significant first */
static inline void fx_mul256(fx_u128 a, fx_u128 b, uint64_t out[4]) {
    uint64_t a0 = (uint64_t)a, a1 = (uint64_t)(a >> 64);
    uint64_t b0 = (uint64_t)b, b1 = (uint64_t)(b >> 64);
    fx_u128 p00 = (fx_u128)a0 * b0;
    fx_u128 p01 = (fx_u128)a0 * b1;
    fx_u128 p10 = (fx_u128)a1 * b0;
    fx_u128 p11 = (fx_u128)a1 * b1;
    fx_u128 mid = (p00 >> 64) + (uint64_t)p01 + (uint64_t)p10;
    out[0] = (uint64_t)p00;
    out[1] = (uint64_t)mid;
    fx_u128 hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    out[2] = (uint64_t)hi;
    out[3] = (uint64_t)(hi >> 64);
}

/* apply sign to an unsigned magnitude; fails outside the int128 range */
static inline int fx_signed(fx_u128 mag, int negative, fx_i128 *out) {
    if (negative) {
        if (mag > ((fx_u128)1 << 127)) return -1;
        *out = (fx_i128)((fx_u128)0 - mag);
    } else {
        if (mag > (fx_u128)FX_MAX) return -1;
        *out = (fx_i128)mag;
    }
    return 0;
}

static inline int fx_mul(fx_i128 a, fx_i128 b, fx_i128 *out) {
    uint64_t limbs[4];
    int negative = (a < 0) != (b < 0);
    fx_mul256(fx_uabs(a), fx_uabs(b), limbs);
    /* long division of the 256-bit product by the 64-bit scale */
    uint64_t q[4];
    fx_u128 rem = 0;
    for (int i = 3; i >= 0; --i) {
        fx_u128 cur = (rem << 64) | limbs[i];
        q[i] = (uint64_t)(cur / FX_SCALE_U64);
        rem = cur % FX_SCALE_U64;
    }
    if (q[3] != 0 || q[2] != 0) return -1;
    fx_u128 mag = ((fx_u128)q[1] << 64) | q[0];
    if (rem >= FX_SCALE_U64 - rem) {
        if (mag == ~(fx_u128)0) return -1;
        mag += 1;
    }
    return fx_signed(mag, negative, out);
}

static inline int fx_div(fx_i128 a, fx_i128 b, fx_i128 *out) {
    if (b == 0) return -1;
    int negative = (a < 0) != (b < 0);
    fx_u128 d = fx_uabs(b);
    uint64_t limbs[4];
    fx_mul256(fx_uabs(a), (fx_u128)FX_SCALE_U64, limbs);
    fx_u128 hi = ((fx_u128)limbs[3] << 64) | limbs[2];
    fx_u128 lo = ((fx_u128)limbs[1] << 64) | limbs[0];
    fx_u128 mag, rem;
    if (hi == 0) {
        mag = lo / d;
        rem = lo % d;
    } else {
        /* quotient must fit in 128 bits, so hi < d is required */
        if (hi >= d) return -1;
        rem = hi;
        mag = 0;
        for (int i = 127; i >= 0; --i) {
            int carry = (int)(rem >> 127);
            rem = (rem << 1) | ((lo >> i) & 1);
            mag <<= 1;
            if (carry || rem >= d) {
                rem -= d;
                mag |= 1;
            }
        }
    }
    if (rem >= d - rem) {
        if (mag == ~(fx_u128)0) return -1;
        mag += 1;
    }
    return fx_signed(mag, negative, out);
}

static inline int fx_add(fx_i128 a, fx_i128 b, fx_i128 *out) {
    return __builtin_add_overflow(a, b, out) ? -1 : 0;
}

static inline int fx_sub(fx_i128 a, fx_i128 b, fx_i128 *out) {
    return __builtin_sub_overflow(a, b, out) ? -1 : 0;
}

#endif
