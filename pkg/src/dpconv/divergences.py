"""Binary hockey-stick, chi^alpha, Renyi and KL divergences, plus Gaussian closed forms.

All divergence arithmetic routes through the log domain so that orders as
large as 1/delta (about 1e5 in the composition code) stay finite. Pure
functions on immutable values; thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import ndtr as _ndtr

from .numerics import log_sum_exp

__all__ = [
    "BinaryDistributionPair",
    "RenyiOrder",
    "hockey_stick_binary",
    "chi_alpha_binary",
    "renyi_binary",
    "kl_binary",
    "chi_of_gamma",
    "chi_inverse",
    "gaussian_renyi",
    "gaussian_delta_eps",
]

# Orders this close to 1 make every 1/(alpha-1) formula numerically meaningless.
MIN_ALPHA_GAP = 1e-9


@dataclass(frozen=True)
class BinaryDistributionPair:
    """Success probabilities of two Bernoulli distributions."""

    p: float
    q: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must be in [0, 1], got {self.p}")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"q must be in [0, 1], got {self.q}")


@dataclass(frozen=True)
class RenyiOrder:
    """Renyi order alpha, strictly above 1."""

    alpha: float

    def __post_init__(self):
        if not self.alpha - 1.0 >= MIN_ALPHA_GAP:
            raise ValueError(f"order must satisfy alpha - 1 >= {MIN_ALPHA_GAP}, got {self.alpha}")


def as_alpha(order: RenyiOrder | float) -> float:
    """Accept a RenyiOrder or a bare float and return a validated alpha."""
    alpha = order.alpha if isinstance(order, RenyiOrder) else float(order)
    if not alpha - 1.0 >= MIN_ALPHA_GAP:
        raise ValueError(f"order must satisfy alpha - 1 >= {MIN_ALPHA_GAP}, got {alpha}")
    return alpha


def hockey_stick_binary(pair: BinaryDistributionPair, lam: float) -> float:
    """E_lambda divergence (p - lam*q)_+ + ((1-p) - lam*(1-q))_+ between Bernoullis."""
    if lam < 0.0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    return max(0.0, pair.p - lam * pair.q) + max(0.0, (1.0 - pair.p) - lam * (1.0 - pair.q))


def _log_power_sum(a: float, b: float, alpha: float) -> float:
    """log(a^alpha b^(1-alpha) + abar^alpha bbar^(1-alpha)) with exact +-inf handling."""
    def term(x, y):
        if x == 0.0:
            return -math.inf  # 0^alpha kills the term for alpha > 1
        if y == 0.0:
            return math.inf   # positive mass against zero mass
        return alpha * math.log(x) + (1.0 - alpha) * math.log(y)

    t1 = term(a, b)
    t2 = term(1.0 - a, 1.0 - b)
    if math.isinf(t1) and t1 > 0 or math.isinf(t2) and t2 > 0:
        return math.inf
    return log_sum_exp([t1, t2])


def chi_alpha_binary(pair: BinaryDistributionPair, order: RenyiOrder | float) -> float:
    """chi^alpha divergence between Bernoulli(p) and Bernoulli(q); inf when q has a zero the p side doesn't."""
    alpha = as_alpha(order)
    log_s = _log_power_sum(pair.p, pair.q, alpha)
    if math.isinf(log_s):
        return math.inf
    return math.expm1(log_s) / (alpha - 1.0)


def renyi_binary(a: float, b: float, order: RenyiOrder | float) -> float:
    """Binary Renyi divergence d_alpha(a||b) for a, b in the open unit interval."""
    alpha = as_alpha(order)
    if not 0.0 < a < 1.0 or not 0.0 < b < 1.0:
        raise ValueError(f"renyi_binary requires a, b in (0, 1), got a={a}, b={b}")
    return _log_power_sum(a, b, alpha) / (alpha - 1.0)


def kl_binary(a: float, b: float) -> float:
    """Binary KL divergence d(a||b) = a log(a/b) + (1-a) log((1-a)/(1-b))."""
    if not 0.0 < a < 1.0 or not 0.0 < b < 1.0:
        raise ValueError(f"kl_binary requires a, b in (0, 1), got a={a}, b={b}")
    return a * (math.log(a) - math.log(b)) + (1.0 - a) * (math.log1p(-a) - math.log1p(-b))


def chi_of_gamma(order: RenyiOrder | float, gamma: float) -> float:
    """(e^{(alpha-1) gamma} - 1)/(alpha - 1): Renyi bound -> chi^alpha bound bijection.

    Saturates to +inf once (alpha-1)*gamma exceeds the double exponent range;
    chi_inverse maps +inf back to +inf.
    """
    alpha = as_alpha(order)
    if gamma < 0.0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    w = (alpha - 1.0) * gamma
    if w > 709.0:
        return math.inf
    return math.expm1(w) / (alpha - 1.0)


def chi_inverse(order: RenyiOrder | float, t: float) -> float:
    """Inverse of chi_of_gamma: log(1 + (alpha-1) t)/(alpha - 1)."""
    alpha = as_alpha(order)
    if t < 0.0:
        raise ValueError(f"t must be >= 0, got {t}")
    return math.log1p((alpha - 1.0) * t) / (alpha - 1.0)


def gaussian_renyi(sigma: float, order: RenyiOrder | float) -> float:
    """Renyi divergence alpha/(2 sigma^2) of a unit-sensitivity Gaussian mechanism."""
    alpha = as_alpha(order)
    if not sigma > 0.0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    return alpha / (2.0 * sigma * sigma)


def gaussian_delta_eps(sigma: float, eps: float) -> float:
    """Exact hockey-stick value Phi(-eps*sigma + 1/(2 sigma)) - e^eps Phi(-eps*sigma - 1/(2 sigma))."""
    if not sigma > 0.0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    if eps < 0.0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    half = 0.5 / sigma
    hi = float(_ndtr(-eps * sigma + half))
    lo = float(_ndtr(-eps * sigma - half))
    return max(0.0, hi - math.exp(eps) * lo)
