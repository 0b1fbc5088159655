"""Compiled inner loops for the spectral series.

The series terms couple a pair of coefficient sequences (e_n, f_n) through a
three-term recurrence whose denominators generate the pole ladder.  Writing
the step in terms of the numerator/denominator pair (N, D) of the coefficient
ratio keeps removable D = 0 points finite: only the combination
(gamma+1) D - U gamma N produces true poles.

Everything here works on plain machine floats:

* factorial-type weights go through lgamma in the log domain (they overflow
  near n = 85 otherwise),
* the coefficient pair is rescaled whenever it leaves [1e-200, 1e200], with
  the accumulated log factor carried separately (the recurrence is linear,
  so a common rescale is exact),
* partial sums are kept as (mantissa, log offset) so huge and tiny terms mix
  without overflow.

Convergence is declared after 10 consecutive terms below tol * |partial sum|;
near the collapse coupling the term ratio approaches 1 and the evaluation is
reported unconverged instead of silently truncated.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - slow pure-python fallback
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


LN2 = 0.6931471805599453


@njit(cache=True, nogil=True)
def derived_scalars(delta, u, g):
    """(gamma, beta, c, a_plus, a_minus, tanh_theta) for one parameter point."""
    gamma = 1.0 / math.sqrt(1.0 - u * u)
    rad = 1.0 - 4.0 * gamma * gamma * g * g
    beta = math.sqrt(rad) if rad > 0.0 else 0.0
    c = u * gamma / (gamma + 1.0)
    a_plus = 1.0 + 4.0 * gamma * g * g
    a_minus = 1.0 - 4.0 * gamma * g * g
    # tanh(theta) via 1 - beta^2 = (2 gamma g)^2; the direct form
    # sqrt((1-beta)/(1+beta)) loses digits to cancellation at small g
    t = 2.0 * gamma * g / (1.0 + beta)
    return gamma, beta, c, a_plus, a_minus, t


@njit(cache=True, nogil=True)
def omega_parts(nq, half_e, delta, u, c, a_plus, a_minus, beta):
    """Numerator and denominator of the coefficient ratio e_n / f_n.

    ``nq`` is n + q and ``half_e`` is 1/2 + E.
    """
    num = delta / 2.0 + 2.0 * u * nq / beta - u / 2.0 - c * (2.0 * a_plus * nq / beta - half_e)
    den = 2.0 * a_minus * nq / beta - half_e - c * (delta / 2.0 + 2.0 * u * nq / beta - u / 2.0)
    return num, den


@njit(cache=True, nogil=True)
def series_eval(e_val, delta, u, g, q, parity, tol, n_max, seed_start, zeroth_seed, seed_scale):
    """Sign, log magnitude, convergence flag and term count of the series

        G = sum_{n >= seed_start} (e_n - parity * f_n) w_n(theta, q),
        w_n = (2(n + q - 1/4))! / (2^n n!) * tanh(theta)^n.

    ``seed_start`` = 0 with ``zeroth_seed`` False is the ordinary function
    whose zeros are eigenvalues; ``seed_start`` = m >= 1 seeds f_m = 1 for the
    pole-line variant, and ``zeroth_seed`` True seeds (e_0, f_0) = (1, 0) for
    the zeroth pole line.
    """
    gamma, beta, c, a_plus, a_minus, t = derived_scalars(delta, u, g)
    half_e = 0.5 + e_val

    n = seed_start
    if zeroth_seed:
        e_c = seed_scale
        f_c = 0.0
    else:
        num, den = omega_parts(n + q, half_e, delta, u, c, a_plus, a_minus, beta)
        if den != 0.0 and math.isfinite(num / den):
            e_c = seed_scale * num / den
            f_c = seed_scale
        else:
            # the ratio diverges at the seed row (U = 0 pole lines); fall back
            # to the pure-numerator direction, which only rescales the zeros
            e_c = seed_scale
            f_c = 0.0

    if g == 0.0 or t == 0.0:
        # the weight kills every term beyond the seed
        coef = e_c - parity * f_c
        w0 = math.lgamma(2.0 * (n + q - 0.25) + 1.0)
        if coef == 0.0:
            return 0, -math.inf, True, 1
        sgn = 1 if coef > 0.0 else -1
        return sgn, math.log(abs(coef)) + w0, True, 1

    ln_t = math.log(t)
    log_tol = math.log(tol)

    e_p = 0.0
    f_p = 0.0
    log_scale = 0.0
    offset = -math.inf
    mant = 0.0
    run = 0
    converged = False
    terms = 0

    while True:
        terms += 1
        wlog = (math.lgamma(2.0 * (n + q - 0.25) + 1.0)
                - n * LN2 - math.lgamma(n + 1.0) + n * ln_t)
        coef = e_c - parity * f_c
        if coef == 0.0:
            tlog = -math.inf
            tsign = 0.0
        else:
            tlog = math.log(abs(coef)) + log_scale + wlog
            tsign = 1.0 if coef > 0.0 else -1.0

        if tlog > -math.inf:
            if mant == 0.0:
                offset = tlog
                mant = tsign
            elif tlog <= offset:
                mant += tsign * math.exp(tlog - offset)
            else:
                mant = mant * math.exp(offset - tlog) + tsign
                offset = tlog
            amant = abs(mant)
            if amant > 1e100 or (0.0 < amant < 1e-100):
                offset += math.log(amant)
                mant /= amant

        if mant == 0.0:
            slog = -math.inf
        else:
            slog = offset + math.log(abs(mant))
        if tlog == -math.inf or (slog > -math.inf and tlog < log_tol + slog):
            run += 1
            if run >= 10:
                converged = True
        else:
            run = 0
        if converged or terms >= n_max:
            break

        # advance the pair to n + 1
        nq = n + q
        a_coef = 2.0 * a_plus * nq - beta * half_e
        b_coef = beta * (delta - u) / 2.0 + 2.0 * u * nq
        raw = a_coef * f_c - b_coef * e_c - g * ((gamma + 1.0) * f_p - u * gamma * e_p)
        num1, den1 = omega_parts(nq + 1.0, half_e, delta, u, c, a_plus, a_minus, beta)
        pole_factor = (gamma + 1.0) * den1 - u * gamma * num1
        denominator = 4.0 * g * (nq + 0.25) * (nq + 0.75) * pole_factor
        f_n = raw * den1 / denominator
        e_n = raw * num1 / denominator
        e_p = e_c
        f_p = f_c
        e_c = e_n
        f_c = f_n
        m = abs(e_c)
        if abs(f_c) > m:
            m = abs(f_c)
        if abs(e_p) > m:
            m = abs(e_p)
        if abs(f_p) > m:
            m = abs(f_p)
        if m > 1e200 or (0.0 < m < 1e-200):
            inv = 1.0 / m
            e_c *= inv
            f_c *= inv
            e_p *= inv
            f_p *= inv
            log_scale += math.log(m)
        n += 1

    if mant == 0.0:
        return 0, -math.inf, converged, terms
    sgn = 1 if mant > 0.0 else -1
    return sgn, offset + math.log(abs(mant)), converged, terms


@njit(cache=True, nogil=True)
def series_eval_batch(e_vals, delta, u, g, q, parity, tol, n_max, seed_start, zeroth_seed, seed_scale):
    count = e_vals.shape[0]
    signs = np.empty(count, np.int64)
    logmags = np.empty(count, np.float64)
    convs = np.empty(count, np.bool_)
    terms = np.empty(count, np.int64)
    for i in range(count):
        s, lm, cv, tm = series_eval(
            e_vals[i], delta, u, g, q, parity, tol, n_max, seed_start, zeroth_seed, seed_scale
        )
        signs[i] = s
        logmags[i] = lm
        convs[i] = cv
        terms[i] = tm
    return signs, logmags, convs, terms


@njit(cache=True, nogil=True)
def series_eval_batch_g(e_vals, g_vals, delta, u, q, parity, tol, n_max, seed_start, zeroth_seed, seed_scale):
    count = e_vals.shape[0]
    signs = np.empty(count, np.int64)
    logmags = np.empty(count, np.float64)
    convs = np.empty(count, np.bool_)
    terms = np.empty(count, np.int64)
    for i in range(count):
        s, lm, cv, tm = series_eval(
            e_vals[i], delta, u, g_vals[i], q, parity, tol, n_max, seed_start, zeroth_seed, seed_scale
        )
        signs[i] = s
        logmags[i] = lm
        convs[i] = cv
        terms[i] = tm
    return signs, logmags, convs, terms
