"""Moments-accountant composition for Gaussian and subsampled-Gaussian mechanisms.

Composition is linear in the Renyi domain (T rounds scale gamma(alpha) by T);
the difference between the classic accountant and the improved one is purely
in the final RDP -> DP conversion step. Everything here is pure and safe to
sweep concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .conversion import zeta_alpha
from .numerics import DEFAULT_TOL, Tolerance, minimize_convex_scalar

__all__ = [
    "GaussianMechanismSpec",
    "SubsampledGaussianSpec",
    "CompositionQuery",
    "RenyiCurve",
    "gaussian_curve",
    "subsampled_curve",
    "rdp_compose",
    "ma_gaussian_epsilon",
    "improved_epsilon",
    "ma_calibrate_sigma",
    "improved_calibrate_sigma",
    "subsampled_spec",
    "admissible_alphas",
    "sgd_epsilon",
]


@dataclass(frozen=True)
class GaussianMechanismSpec:
    """Gaussian mechanism with noise std sigma per unit L2-sensitivity."""

    sigma: float

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")

    @property
    def rho(self) -> float:
        return 1.0 / (2.0 * self.sigma * self.sigma)


@dataclass(frozen=True)
class SubsampledGaussianSpec:
    """Subsampled Gaussian (noisy-SGD round) with rate q; requires q < 1/(16 sigma)."""

    sigma: float
    q: float

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"q must be in (0, 1), got {self.q}")
        if not self.q < 1.0 / (16.0 * self.sigma):
            raise ValueError(
                f"subsampling requires q < 1/(16 sigma) = {1.0 / (16.0 * self.sigma):.6g}, "
                f"got q = {self.q}")

    @property
    def rho_q(self) -> float:
        return self.q * self.q / ((1.0 - self.q) * self.sigma * self.sigma)


@dataclass(frozen=True)
class CompositionQuery:
    """How many rounds to compose and at which target delta."""

    rounds: int
    delta: float

    def __post_init__(self):
        if self.rounds < 0:
            raise ValueError(f"rounds must be >= 0, got {self.rounds}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")


@dataclass(frozen=True)
class RenyiCurve:
    """RDP profile alpha -> gamma(alpha), optionally restricted to a set of valid orders."""

    gamma_fn: Callable[[float], float]
    alphas: tuple[int, ...] | None = None  # None means every alpha > 1 is valid

    def gamma(self, alpha: float) -> float:
        return self.gamma_fn(alpha)


def gaussian_curve(sigma: float) -> RenyiCurve:
    rho = GaussianMechanismSpec(sigma).rho
    return RenyiCurve(lambda a: rho * a)


def subsampled_curve(spec: SubsampledGaussianSpec) -> RenyiCurve:
    rho_q = spec.rho_q
    return RenyiCurve(lambda a: rho_q * a, alphas=tuple(admissible_alphas(spec)))


def rdp_compose(curve: RenyiCurve, T: int) -> RenyiCurve:
    """T-fold adaptive homogeneous composition: gamma(alpha) scales to T*gamma(alpha)."""
    if T < 0:
        raise ValueError(f"T must be >= 0, got {T}")
    base = curve.gamma_fn
    return RenyiCurve(lambda a: float(T) * base(a), alphas=curve.alphas)


def _check_composition(rho: float, T: int, delta: float):
    if not rho > 0.0:
        raise ValueError(f"rho must be > 0, got {rho}")
    if T < 0:
        raise ValueError(f"T must be >= 0, got {T}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")


def ma_gaussian_epsilon(rho: float, T: int, delta: float) -> float:
    """Classic accountant epsilon rho*T + sqrt(4 rho T log(1/delta)) for T Gaussian rounds."""
    _check_composition(rho, T, delta)
    rho_T = rho * T
    return rho_T + math.sqrt(4.0 * rho_T * math.log(1.0 / delta))


def _eps0_term(alpha: float, rho_T: float, delta: float) -> float:
    # unclamped first conversion bound; the (.)_+ clamp commutes with the inf
    return rho_T * alpha + math.log(zeta_alpha(alpha) / delta) / (alpha - 1.0)


def _eps1_term(alpha: float, rho_T: float, delta: float) -> float:
    w = rho_T * alpha * (alpha - 1.0)
    ad = alpha * delta
    if w < 30.0:
        return math.log1p(math.expm1(w) / ad) / (alpha - 1.0)
    return (w + math.log1p(-(1.0 - ad) * math.exp(-w)) - math.log(ad)) / (alpha - 1.0)


def _min_over_orders(term: Callable[[float], float], delta: float,
                     tol: Tolerance, n_scan: int = 64) -> float:
    """Minimize term(alpha) over alpha in (1, 1/delta]: coarse log-spaced scan,
    then golden-section in log(alpha - 1) around each local scan minimum."""
    gap_hi = 1.0 / delta - 1.0
    s = np.linspace(math.log(1e-8), math.log(gap_hi), n_scan)
    vals = np.array([term(1.0 + math.exp(si)) for si in s])
    best = float(vals.min())
    obj = lambda t: term(1.0 + math.exp(t))
    for i in range(n_scan):
        left = vals[i - 1] if i > 0 else math.inf
        right = vals[i + 1] if i < n_scan - 1 else math.inf
        if vals[i] <= left and vals[i] <= right:
            lo = s[max(0, i - 1)]
            hi = s[min(n_scan - 1, i + 1)]
            if lo < hi:
                _, v = minimize_convex_scalar(obj, lo, hi, tol)
                best = min(best, v)
    return best


def improved_epsilon(rho: float, T: int, delta: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Improved accountant epsilon for T Gaussian rounds: the tight conversion bound
    minimized over orders in (1, 1/delta], never above ma_gaussian_epsilon."""
    _check_composition(rho, T, delta)
    rho_T = rho * T
    if rho_T == 0.0:
        return 0.0
    eps0 = max(0.0, _min_over_orders(lambda a: _eps0_term(a, rho_T, delta), delta, tol))
    eps1 = _min_over_orders(lambda a: _eps1_term(a, rho_T, delta), delta, tol)
    eps_big_alpha = max(0.0, rho_T / delta + math.log1p(-delta))
    return min(eps0, eps1, eps_big_alpha)


def ma_calibrate_sigma(eps: float, delta: float, T: int) -> float:
    """Noise level with sigma^2 = (2T/eps^2) log(1/delta) + T/eps (classic accountant)."""
    if not eps > 0.0:
        raise ValueError(f"eps must be > 0, got {eps}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    L = math.log(1.0 / delta)
    return math.sqrt((2.0 * T / (eps * eps)) * L + T / eps)


def improved_calibrate_sigma(eps: float, delta: float, T: int) -> float:
    """Noise level from the three-term improved bound; requires eps > 2 delta log(1/delta).

    sigma^2 = (2T/eps^2) log(1/delta) + T/eps - (2T/eps^2)(log(2 log(1/delta)) + 1 - log eps),
    with the higher-order term dropped, so the result undershoots slightly; the
    accountant-side check is improved_epsilon at this sigma, not equality.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    L = math.log(1.0 / delta)
    if not eps > 2.0 * delta * L:
        raise ValueError(
            f"improved calibration requires eps > 2 delta log(1/delta) = {2.0 * delta * L:.6g}, "
            f"got eps = {eps}")
    sigma2 = (2.0 * T / (eps * eps)) * L + T / eps \
        - (2.0 * T / (eps * eps)) * (math.log(2.0 * L) + 1.0 - math.log(eps))
    if not sigma2 > 0.0:
        raise ValueError(f"corrected sigma^2 = {sigma2:.6g} is not positive at eps={eps}, delta={delta}")
    return math.sqrt(sigma2)


def subsampled_spec(q: float, sigma: float) -> SubsampledGaussianSpec:
    """Validated subsampled-Gaussian spec (q < 1/(16 sigma)) with rho_q populated."""
    return SubsampledGaussianSpec(sigma=sigma, q=q)


def admissible_alphas(spec: SubsampledGaussianSpec) -> list[int]:
    """Integer orders {2, ..., floor(1 + sigma^2 log(1/(q sigma)))} where the
    subsampled RDP parameter alpha*rho_q is valid."""
    amax = math.floor(1.0 + spec.sigma ** 2 * math.log(1.0 / (spec.q * spec.sigma)))
    if amax < 2:
        raise ValueError(
            f"no admissible integer orders: bound {amax} < 2 for q={spec.q}, sigma={spec.sigma}")
    return list(range(2, amax + 1))


def sgd_epsilon(spec: SubsampledGaussianSpec, T: int, delta: float,
                method: str = "improved") -> float:
    """Accountant epsilon for T subsampled-Gaussian rounds, orders restricted to
    the admissible integer set (both methods, so improved <= ma holds per order)."""
    if method not in ("ma", "improved"):
        raise ValueError(f"method must be 'ma' or 'improved', got {method!r}")
    _check_composition(spec.rho_q, T, delta)
    rho_T = spec.rho_q * T
    if rho_T == 0.0:
        return 0.0
    orders = [a for a in admissible_alphas(spec) if a <= 1.0 / delta]
    if not orders:
        raise ValueError("no admissible order at or below 1/delta")
    L = math.log(1.0 / delta)
    if method == "ma":
        return min(rho_T * a + L / (a - 1.0) for a in orders)
    cands = [max(0.0, _eps0_term(a, rho_T, delta)) for a in orders]
    cands += [_eps1_term(a, rho_T, delta) for a in orders]
    return min(cands)
