"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np

LOG_I0_CROSSOVER = 17.0
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)
# Term counts that take both branches below 1e-17 relative at the crossover.
_SERIES_TERMS = 48
_ASYMPTOTIC_TERMS = 30


def log_i0(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    small = x < LOG_I0_CROSSOVER

    xs = x[small]
    q = 0.25 * xs * xs
    term = np.ones_like(xs)
    total = np.ones_like(xs)
    for k in range(1, _SERIES_TERMS + 1):
        term *= q / (k * k)
        total += term
    out[small] = np.log(total)

    xl = x[~small]
    term = np.ones_like(xl)
    total = np.ones_like(xl)
    for k in range(1, _ASYMPTOTIC_TERMS + 1):
        term *= (2 * k - 1) ** 2 / (8.0 * xl * k)
        total += term
    out[~small] = xl - 0.5 * np.log(xl) - _HALF_LOG_2PI + np.log(total)
    return out


def _tie_prefers_one(dec, step, p0, p1, m, mask):
    x, y, j, ux, uy = p0, p1, step, 0, 0
    while x != y and j > 0:
        ux, uy = x >> (m - 1), y >> (m - 1)
        x = ((x << 1) & mask) | int(dec[j - 1, x])
        y = ((y << 1) & mask) | int(dec[j - 1, y])
        j -= 1
    return ux > uy


def viterbi(llrs, outputs, n_info, m):
    llrs = np.asarray(llrs, dtype=np.float64)
    outputs = np.asarray(outputs)
    n_states = 1 << m
    mask = n_states - 1
    n_steps = n_info + m

    states = np.arange(n_states)
    inputs = states >> (m - 1)
    p0 = (states << 1) & mask
    p1 = p0 | 1
    out0 = outputs[p0, inputs]
    out1 = outputs[p1, inputs]
    sign_c1 = np.array([-1.0, -1.0, 1.0, 1.0])
    sign_c2 = np.array([-1.0, 1.0, -1.0, 1.0])
    s0 = (sign_c1[out0], sign_c2[out0])
    s1 = (sign_c1[out1], sign_c2[out1])
    blocked = inputs == 1

    dec = np.zeros((n_steps, n_states), dtype=np.uint8)
    cur = np.full(n_states, -np.inf)
    cur[0] = 0.0
    with np.errstate(invalid="ignore"):
        for k in range(n_steps):
            l1, l2 = llrs[2 * k], llrs[2 * k + 1]
            m0 = cur[p0] + s0[0] * l1 + s0[1] * l2
            m1 = cur[p1] + s1[0] * l1 + s1[1] * l2
            choose = m1 > m0
            nxt = np.where(choose, m1, m0)
            dec[k] = choose
            ties = np.flatnonzero((m0 == m1) & np.isfinite(m0))
            for n in ties:
                if _tie_prefers_one(dec, k, int(p0[n]), int(p1[n]), m, mask):
                    dec[k, n] = 1
            if k >= n_info:
                nxt[blocked] = -np.inf
                dec[k, blocked] = 0
            cur = nxt

    bits = np.zeros(n_info, dtype=np.uint8)
    n = 0
    for k in range(n_steps - 1, -1, -1):
        if k < n_info:
            bits[k] = n >> (m - 1)
        n = ((n << 1) & mask) | int(dec[k, n])
    return bits, float(cur[0])
