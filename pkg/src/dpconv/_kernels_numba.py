"""Numba-jitted hot kernels.

These carry the inner loops that dominate runtime: the conversion objective
minimization, privacy-region boundary bisections, and batched binary
divergences. `_kernels_numpy` implements the same contracts in pure numpy;
`backend` picks between the two.
"""

import math

import numpy as np
from numba import njit, prange

ETA_P = 1e-12       # inset of the optimizer interval inside (delta, 1)
TAU_CLIP = 1e-12    # region code clips tau/beta to [TAU_CLIP, 1 - TAU_CLIP]
BISECT_ITERS = 90

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@njit(cache=True)
def _lse2(a, b):
    if a == -np.inf:
        return b
    if b == -np.inf:
        return a
    m = a if a > b else b
    return m + math.log1p(math.exp(-abs(a - b)))


@njit(cache=True)
def log_h1(p, alpha, eps, delta):
    """log of p^a (p-d)^(1-a) + (1-p)^a (e^e - p + d)^(1-a) on p in (delta, 1]."""
    t1 = alpha * math.log(p) + (1.0 - alpha) * math.log(p - delta)
    if p >= 1.0:
        t2 = -np.inf
    else:
        # log(e^eps - p + delta) = eps + log1p((delta - p) e^-eps), overflow-free
        t2 = alpha * math.log1p(-p) \
            + (1.0 - alpha) * (eps + math.log1p((delta - p) * math.exp(-eps)))
    return _lse2(t1, t2)


@njit(cache=True)
def h1_log_min(alpha, eps, delta, abs_tol, max_iters):
    """Golden-section minimum of log_h1 over (delta, 1), boundary limit included.

    Returns (log of the infimum, interior argmin or NaN when the infimum is
    the p -> 1 boundary limit).
    """
    a = delta + ETA_P
    b = 1.0 - ETA_P
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1 = log_h1(x1, alpha, eps, delta)
    f2 = log_h1(x2, alpha, eps, delta)
    it = 0
    while (b - a) > abs_tol and it < max_iters:
        if f1 <= f2:
            b = x2
            x2 = x1
            f2 = f1
            x1 = b - _INV_PHI * (b - a)
            f1 = log_h1(x1, alpha, eps, delta)
        else:
            a = x1
            x1 = x2
            f1 = f2
            x2 = a + _INV_PHI * (b - a)
            f2 = log_h1(x2, alpha, eps, delta)
        it += 1
    p = 0.5 * (a + b)
    v = log_h1(p, alpha, eps, delta)
    vb = (1.0 - alpha) * math.log1p(-delta)  # p -> 1 limit of log_h1
    if vb <= v:
        return vb, np.nan
    return v, p


@njit(cache=True, parallel=True)
def gamma_exact_batch(alphas, epss, deltas, abs_tol, max_iters):
    n = alphas.shape[0]
    out = np.empty(n, dtype=np.float64)
    pstar = np.empty(n, dtype=np.float64)
    for i in prange(n):
        if deltas[i] <= 0.0:
            out[i] = 0.0
            pstar[i] = np.nan
        else:
            v, p = h1_log_min(alphas[i], epss[i], deltas[i], abs_tol, max_iters)
            out[i] = epss[i] + v / (alphas[i] - 1.0)
            pstar[i] = p
    return out, pstar


@njit(cache=True)
def dalpha_log(a, b, alpha):
    """Binary Renyi divergence d_alpha(a||b), stable down to alpha near 1."""
    h = alpha - 1.0
    u = math.log(a) - math.log(b)
    v = math.log1p(-a) - math.log1p(-b)
    t1 = math.log(a) + h * u
    t2 = math.log1p(-a) + h * v
    return _lse2(t1, t2) / h


@njit(cache=True)
def dkl(a, b):
    return a * (math.log(a) - math.log(b)) + (1.0 - a) * (math.log1p(-a) - math.log1p(-b))


@njit(cache=True)
def _div(a, b, alpha):
    # alpha <= 1 selects the KL divergence
    if alpha > 1.0:
        return dalpha_log(a, b, alpha)
    return dkl(a, b)


@njit(cache=True)
def region_boundary(alpha, gamma, tau):
    """Smallest beta in (0, 1-tau] with div(1-tau||beta) <= gamma and div(1-beta||tau) <= gamma.

    alpha <= 1 selects the binary KL constraints.
    """
    t = tau
    if t < TAU_CLIP:
        t = TAU_CLIP
    if t > 1.0 - TAU_CLIP:
        t = 1.0 - TAU_CLIP
    ubar = 1.0 - t
    if gamma <= 0.0:
        return ubar
    # first constraint: div(ubar || b) decreasing in b on (0, ubar]
    beta1 = 0.0
    if _div(ubar, 1e-300, alpha) > gamma:
        lo = 1e-300
        hi = ubar
        for _ in range(BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            if _div(ubar, mid, alpha) > gamma:
                lo = mid
            else:
                hi = mid
        beta1 = hi
    # second constraint: div(a || tau) increasing in a on [tau, 1)
    beta2 = 0.0
    if _div(1.0 - 1e-15, t, alpha) > gamma:
        lo = t
        hi = 1.0 - 1e-15
        for _ in range(BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            if _div(mid, t, alpha) > gamma:
                hi = mid
            else:
                lo = mid
        beta2 = 1.0 - lo
    beta = beta1 if beta1 > beta2 else beta2
    if beta > ubar:
        beta = ubar
    return beta


@njit(cache=True, parallel=True)
def region_boundary_batch(alpha, gamma, taus):
    n = taus.shape[0]
    out = np.empty(n, dtype=np.float64)
    for i in prange(n):
        out[i] = region_boundary(alpha, gamma, taus[i])
    return out


@njit(cache=True, parallel=True)
def renyi_binary_batch(a, b, alphas):
    n = a.shape[0]
    out = np.empty(n, dtype=np.float64)
    for i in prange(n):
        out[i] = dalpha_log(a[i], b[i], alphas[i])
    return out


@njit(cache=True, parallel=True)
def hockey_stick_batch(p, q, lam):
    n = p.shape[0]
    out = np.empty(n, dtype=np.float64)
    for i in prange(n):
        s = p[i] - lam[i] * q[i]
        t = (1.0 - p[i]) - lam[i] * (1.0 - q[i])
        acc = s if s > 0.0 else 0.0
        if t > 0.0:
            acc += t
        out[i] = acc
    return out
