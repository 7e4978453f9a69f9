"""Pure-numpy fallback kernels, contract-identical to `_kernels_numba`.

Batch entry points run whole-array contractions (every lane iterates in
lockstep); scalar entry points use plain math loops. Selected by setting
DPCONV_BACKEND=numpy or automatically when numba is unavailable.
"""

import math

import numpy as np

ETA_P = 1e-12
TAU_CLIP = 1e-12
GOLDEN_ITERS = 90
BISECT_ITERS = 90

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _lse2(a, b):
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    m = a if a > b else b
    return m + math.log1p(math.exp(-abs(a - b)))


def log_h1(p, alpha, eps, delta):
    t1 = alpha * math.log(p) + (1.0 - alpha) * math.log(p - delta)
    if p >= 1.0:
        t2 = -math.inf
    else:
        # log(e^eps - p + delta) = eps + log1p((delta - p) e^-eps), overflow-free
        t2 = alpha * math.log1p(-p) \
            + (1.0 - alpha) * (eps + math.log1p((delta - p) * math.exp(-eps)))
    return _lse2(t1, t2)


def h1_log_min(alpha, eps, delta, abs_tol, max_iters):
    a = delta + ETA_P
    b = 1.0 - ETA_P
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1 = log_h1(x1, alpha, eps, delta)
    f2 = log_h1(x2, alpha, eps, delta)
    it = 0
    while (b - a) > abs_tol and it < max_iters:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = log_h1(x1, alpha, eps, delta)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = log_h1(x2, alpha, eps, delta)
        it += 1
    p = 0.5 * (a + b)
    v = log_h1(p, alpha, eps, delta)
    vb = (1.0 - alpha) * math.log1p(-delta)
    if vb <= v:
        return vb, math.nan
    return v, p


def _log_h1_vec(p, alpha, eps, delta):
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        t1 = alpha * np.log(p) + (1.0 - alpha) * np.log(p - delta)
        log_q = eps + np.log1p((delta - p) * np.exp(-eps))
        t2 = np.where(p < 1.0, alpha * np.log1p(-p) + (1.0 - alpha) * log_q, -np.inf)
        m = np.maximum(t1, t2)
        out = m + np.log1p(np.exp(-np.abs(t1 - t2)))
        out = np.where(np.isinf(t1) & np.isinf(t2), m, out)
    return out


def gamma_exact_batch(alphas, epss, deltas, abs_tol, max_iters):
    alphas = np.asarray(alphas, dtype=np.float64)
    epss = np.asarray(epss, dtype=np.float64)
    deltas = np.asarray(deltas, dtype=np.float64)
    a = deltas + ETA_P
    b = np.full_like(a, 1.0 - ETA_P)
    n_iter = min(max_iters, GOLDEN_ITERS)
    for _ in range(n_iter):
        x1 = b - _INV_PHI * (b - a)
        x2 = a + _INV_PHI * (b - a)
        f1 = _log_h1_vec(x1, alphas, epss, deltas)
        f2 = _log_h1_vec(x2, alphas, epss, deltas)
        left = f1 <= f2
        b = np.where(left, x2, b)
        a = np.where(left, a, x1)
    p = 0.5 * (a + b)
    v = _log_h1_vec(p, alphas, epss, deltas)
    vb = (1.0 - alphas) * np.log1p(-deltas)
    boundary = vb <= v
    v = np.where(boundary, vb, v)
    pstar = np.where(boundary, np.nan, p)
    out = epss + v / (alphas - 1.0)
    zero = deltas <= 0.0
    out = np.where(zero, 0.0, out)
    pstar = np.where(zero, np.nan, pstar)
    return out, pstar


def dalpha_log(a, b, alpha):
    h = alpha - 1.0
    u = math.log(a) - math.log(b)
    v = math.log1p(-a) - math.log1p(-b)
    t1 = math.log(a) + h * u
    t2 = math.log1p(-a) + h * v
    return _lse2(t1, t2) / h


def dkl(a, b):
    return a * (math.log(a) - math.log(b)) + (1.0 - a) * (math.log1p(-a) - math.log1p(-b))


def _div(a, b, alpha):
    if alpha > 1.0:
        return dalpha_log(a, b, alpha)
    return dkl(a, b)


def region_boundary(alpha, gamma, tau):
    t = min(max(tau, TAU_CLIP), 1.0 - TAU_CLIP)
    ubar = 1.0 - t
    if gamma <= 0.0:
        return ubar
    beta1 = 0.0
    if _div(ubar, 1e-300, alpha) > gamma:
        lo, hi = 1e-300, ubar
        for _ in range(BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            if _div(ubar, mid, alpha) > gamma:
                lo = mid
            else:
                hi = mid
        beta1 = hi
    beta2 = 0.0
    if _div(1.0 - 1e-15, t, alpha) > gamma:
        lo, hi = t, 1.0 - 1e-15
        for _ in range(BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            if _div(mid, t, alpha) > gamma:
                hi = mid
            else:
                lo = mid
        beta2 = 1.0 - lo
    return min(max(beta1, beta2), ubar)


def _div_vec(a, b, alpha):
    with np.errstate(divide="ignore", invalid="ignore"):
        if alpha > 1.0:
            h = alpha - 1.0
            t1 = np.log(a) + h * (np.log(a) - np.log(b))
            t2 = np.log1p(-a) + h * (np.log1p(-a) - np.log1p(-b))
            m = np.maximum(t1, t2)
            out = (m + np.log1p(np.exp(-np.abs(t1 - t2)))) / h
            return np.where(np.isinf(t1) & np.isinf(t2), m / h, out)
        return a * (np.log(a) - np.log(b)) + (1.0 - a) * (np.log1p(-a) - np.log1p(-b))


def region_boundary_batch(alpha, gamma, taus):
    taus = np.asarray(taus, dtype=np.float64)
    t = np.clip(taus, TAU_CLIP, 1.0 - TAU_CLIP)
    ubar = 1.0 - t
    if gamma <= 0.0:
        return ubar.copy()
    # constraint 1 bisection in b
    lo = np.full_like(t, 1e-300)
    hi = ubar.copy()
    active1 = _div_vec(ubar, lo, alpha) > gamma
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        too_big = _div_vec(ubar, mid, alpha) > gamma
        lo = np.where(too_big, mid, lo)
        hi = np.where(too_big, hi, mid)
    beta1 = np.where(active1, hi, 0.0)
    # constraint 2 bisection in a = 1 - beta
    lo = t.copy()
    hi = np.full_like(t, 1.0 - 1e-15)
    active2 = _div_vec(hi, t, alpha) > gamma
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        too_big = _div_vec(mid, t, alpha) > gamma
        hi = np.where(too_big, mid, hi)
        lo = np.where(too_big, lo, mid)
    beta2 = np.where(active2, 1.0 - lo, 0.0)
    return np.minimum(np.maximum(beta1, beta2), ubar)


def renyi_binary_batch(a, b, alphas):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    alphas = np.asarray(alphas, dtype=np.float64)
    h = alphas - 1.0
    t1 = np.log(a) + h * (np.log(a) - np.log(b))
    t2 = np.log1p(-a) + h * (np.log1p(-a) - np.log1p(-b))
    m = np.maximum(t1, t2)
    return (m + np.log1p(np.exp(-np.abs(t1 - t2)))) / h


def hockey_stick_batch(p, q, lam):
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    return np.maximum(p - lam * q, 0.0) + np.maximum((1.0 - p) - lam * (1.0 - q), 0.0)
