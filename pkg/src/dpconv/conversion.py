"""Optimal conversion between Renyi DP and approximate DP, plus closed-form bounds.

The central object is the map gamma(alpha, eps, delta): the largest Renyi
bound at order alpha that still forces (eps, delta)-DP. It is computed by a
one-dimensional convex minimization; its inversions in eps and delta are
monotone bisections on top of it, and the closed-form lower/upper bounds give
the cheap route plus guaranteed brackets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .divergences import RenyiOrder, as_alpha
from .numerics import BracketError, DEFAULT_TOL, Tolerance

__all__ = [
    "ApproxDPPoint",
    "RenyiPoint",
    "ConversionResult",
    "zeta_alpha",
    "h1_objective",
    "gamma_exact",
    "gamma_exact_batch",
    "gamma_lower_bound",
    "epsilon_upper_bound",
    "epsilon_exact",
    "delta_exact",
    "abadi_delta",
    "zero_epsilon_range",
]


@dataclass(frozen=True)
class ApproxDPPoint:
    """An (epsilon, delta) approximate-DP guarantee."""

    epsilon: float
    delta: float

    def __post_init__(self):
        if not self.epsilon >= 0.0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if not 0.0 <= self.delta < 1.0:
            raise ValueError(f"delta must be in [0, 1), got {self.delta}")


@dataclass(frozen=True)
class RenyiPoint:
    """An (alpha, gamma) Renyi-DP guarantee."""

    order: RenyiOrder
    gamma: float

    def __post_init__(self):
        if not self.gamma >= 0.0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")


@dataclass(frozen=True)
class ConversionResult:
    """Converted parameter plus the interior minimizer (when one exists) and how it was obtained."""

    value: float
    minimizer_p: float | None
    method: str  # one of: exact, bound-g, bound-f, closed-form


def zeta_alpha(alpha: float) -> float:
    """The constant (1/alpha)(1 - 1/alpha)^(alpha-1) from the closed-form bounds."""
    return (1.0 / alpha) * (1.0 - 1.0 / alpha) ** (alpha - 1.0)


def _check_eps(eps: float):
    if not eps >= 0.0:
        raise ValueError(f"eps must be >= 0, got {eps}")


def _check_delta(delta: float, *, open_zero: bool = False):
    lo_ok = delta > 0.0 if open_zero else delta >= 0.0
    if not (lo_ok and delta < 1.0):
        lo = "(0" if open_zero else "[0"
        raise ValueError(f"delta must be in {lo}, 1), got {delta}")


def h1_objective(p: float, order: RenyiOrder | float, eps: float, delta: float) -> float:
    """The convex objective p^a (p-d)^(1-a) + (1-p)^a (e^e - p + d)^(1-a) on p in (delta, 1)."""
    alpha = as_alpha(order)
    _check_eps(eps)
    _check_delta(delta)
    if not delta < p < 1.0:
        raise ValueError(f"p must lie in ({delta}, 1), got {p}")
    return math.exp(kernels.log_h1(p, alpha, eps, delta))


def gamma_exact(order: RenyiOrder | float, eps: float, delta: float,
                tol: Tolerance = DEFAULT_TOL) -> ConversionResult:
    """Largest gamma such that every (alpha, gamma)-RDP mechanism is (eps, delta)-DP.

    Equal to eps + log(inf of h1_objective over p in (delta, 1))/(alpha - 1);
    the infimum compares the interior golden-section minimum against the
    analytic p -> 1 boundary limit (1 - delta)^(1 - alpha). delta = 0 returns
    0 without optimization.
    """
    alpha = as_alpha(order)
    _check_eps(eps)
    _check_delta(delta)
    if delta == 0.0:
        return ConversionResult(0.0, None, "closed-form")
    log_min, p_star = kernels.h1_log_min(alpha, eps, delta, tol.abs_tol, tol.max_iters)
    value = eps + log_min / (alpha - 1.0)
    return ConversionResult(value, None if math.isnan(p_star) else p_star, "exact")


def gamma_exact_batch(orders, epss, deltas, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Vectorized gamma_exact values over broadcast (alpha, eps, delta) arrays."""
    alphas, epss, deltas = np.broadcast_arrays(
        np.asarray(orders, dtype=np.float64),
        np.asarray(epss, dtype=np.float64),
        np.asarray(deltas, dtype=np.float64),
    )
    values, _ = kernels.gamma_exact_batch(
        np.ascontiguousarray(alphas), np.ascontiguousarray(epss),
        np.ascontiguousarray(deltas), tol.abs_tol, tol.max_iters)
    return values


def gamma_lower_bound(order: RenyiOrder | float, eps: float, delta: float) -> ConversionResult:
    """Closed-form lower bound max{g, f} on gamma_exact; exact when delta = 0 or alpha*delta >= 1."""
    alpha = as_alpha(order)
    _check_eps(eps)
    _check_delta(delta)
    if delta == 0.0:
        return ConversionResult(0.0, None, "closed-form")
    if alpha * delta >= 1.0:
        return ConversionResult(eps - math.log1p(-delta), None, "closed-form")
    g = eps - math.log(zeta_alpha(alpha) / delta) / (alpha - 1.0)
    e_eps = math.exp(eps)
    f_inner = (e_eps - alpha * delta) * ((delta - 1.0) / (delta - e_eps)) ** alpha + alpha * delta
    f = eps + math.log(f_inner) / (alpha - 1.0)
    if g >= f:
        return ConversionResult(g, None, "bound-g")
    return ConversionResult(f, None, "bound-f")


def _eps_bound_terms(alpha: float, gamma: float, delta: float) -> tuple[float, float]:
    """The two candidate upper bounds on eps for the alpha*delta < 1 branch."""
    term_g = max(0.0, gamma - math.log(delta / zeta_alpha(alpha)) / (alpha - 1.0))
    w = (alpha - 1.0) * gamma
    ad = alpha * delta
    if w < 30.0:
        term_f = math.log1p(math.expm1(w) / ad) / (alpha - 1.0)
    else:
        # log((e^w - (1 - ad))/ad) without overflow
        term_f = (w + math.log1p(-(1.0 - ad) * math.exp(-w)) - math.log(ad)) / (alpha - 1.0)
    return term_g, term_f


def epsilon_upper_bound(order: RenyiOrder | float, gamma: float, delta: float) -> ConversionResult:
    """Valid (eps, delta)-DP epsilon for every (alpha, gamma)-RDP mechanism (closed form).

    For alpha*delta >= 1 this is exact: (gamma + log(1-delta))_+. Otherwise it
    is the smaller of the two closed-form terms; the second tends to 0 with
    gamma, so the bound vanishes at gamma = 0 for every fixed delta > 0. The
    bound is also exactly 0 for delta > max{1 - e^-gamma, 1/alpha}.
    """
    alpha = as_alpha(order)
    if gamma < 0.0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    _check_delta(delta, open_zero=True)
    if alpha * delta >= 1.0:
        return ConversionResult(max(0.0, gamma + math.log1p(-delta)), None, "closed-form")
    term_g, term_f = _eps_bound_terms(alpha, gamma, delta)
    if term_g <= term_f:
        return ConversionResult(term_g, None, "bound-g")
    return ConversionResult(term_f, None, "bound-f")


def epsilon_exact(order: RenyiOrder | float, gamma: float, delta: float,
                  tol: Tolerance = DEFAULT_TOL) -> ConversionResult:
    """Smallest eps making every (alpha, gamma)-RDP mechanism (eps, delta)-DP.

    Bisection on the monotone map eps -> gamma_exact(alpha, eps, delta), with
    epsilon_upper_bound as a guaranteed finite bracket.
    """
    alpha = as_alpha(order)
    if gamma < 0.0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    _check_delta(delta, open_zero=True)
    if gamma == 0.0:
        return ConversionResult(0.0, None, "exact")
    if gamma_exact(alpha, 0.0, delta, tol).value >= gamma:
        return ConversionResult(0.0, None, "exact")
    hi = max(epsilon_upper_bound(alpha, gamma, delta).value, tol.abs_tol)
    for _ in range(60):
        if gamma_exact(alpha, hi, delta, tol).value >= gamma:
            break
        hi *= 2.0
    lo = 0.0
    for _ in range(tol.max_iters):
        if hi - lo <= max(tol.abs_tol, tol.rel_tol * hi):
            break
        mid = 0.5 * (lo + hi)
        if gamma_exact(alpha, mid, delta, tol).value < gamma:
            lo = mid
        else:
            hi = mid
    eps = 0.5 * (lo + hi)
    return ConversionResult(eps, gamma_exact(alpha, eps, delta, tol).minimizer_p, "exact")


def delta_exact(order: RenyiOrder | float, gamma: float, eps: float,
                tol: Tolerance = DEFAULT_TOL) -> ConversionResult:
    """Smallest delta making every (alpha, gamma)-RDP mechanism (eps, delta)-DP.

    Bisection on the nondecreasing map delta -> gamma_exact(alpha, eps, delta).
    Always strictly below 1; a gamma too large for even delta -> 1 raises
    BracketError.
    """
    alpha = as_alpha(order)
    if gamma < 0.0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    _check_eps(eps)
    if gamma == 0.0:
        return ConversionResult(0.0, None, "exact")
    hi = 1.0 - 1e-12
    if gamma_exact(alpha, eps, hi, tol).value < gamma:
        raise BracketError(
            f"gamma={gamma} not reachable below delta=1 at alpha={alpha}, eps={eps}")
    lo = 0.0
    for _ in range(tol.max_iters):
        if hi - lo <= tol.abs_tol * 1e-4 + tol.rel_tol * hi:
            break
        mid = 0.5 * (lo + hi)
        if gamma_exact(alpha, eps, mid, tol).value < gamma:
            lo = mid
        else:
            hi = mid
    delta = 0.5 * (lo + hi)
    return ConversionResult(delta, gamma_exact(alpha, eps, delta, tol).minimizer_p, "exact")


def abadi_delta(order: RenyiOrder | float, gamma: float, eps: float) -> float:
    """Moments-accountant baseline delta = e^{-(alpha-1)(eps - gamma)}, valid for eps > gamma."""
    alpha = as_alpha(order)
    if gamma < 0.0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    if not eps > gamma:
        raise ValueError(f"baseline requires eps > gamma, got eps={eps}, gamma={gamma}")
    return math.exp(-(alpha - 1.0) * (eps - gamma))


def zero_epsilon_range(order: RenyiOrder | float, gamma: float) -> tuple[float, float] | None:
    """Delta interval [zeta_alpha e^{(alpha-1) gamma}, 1/alpha] where epsilon_upper_bound is 0.

    Empty (None) when gamma >= log(alpha/(alpha-1)). Beyond the interval,
    every delta > max{1 - e^-gamma, 1/alpha} also yields 0 via the
    alpha*delta >= 1 branch.
    """
    alpha = as_alpha(order)
    if gamma < 0.0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    if gamma >= math.log(alpha / (alpha - 1.0)):
        return None
    lo = zeta_alpha(alpha) * math.exp((alpha - 1.0) * gamma)
    hi = 1.0 / alpha
    if lo > hi:
        return None
    return (lo, hi)
