"""Hypothesis-test DP: tradeoff curves, privacy regions, and their Renyi-derived bounds.

A tradeoff curve maps a type I error level to the smallest achievable type II
error; the privacy region is everything between the curve and the diagonal
beta = 1 - tau. Region bounds come in three flavors: exact Gaussian curves,
order-wise binary-divergence constraints, and approximate-DP supporting lines.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import ndtr as _ndtr, ndtri as _ndtri

from .accountant import RenyiCurve, admissible_alphas, rdp_compose, subsampled_curve, subsampled_spec
from .backend import kernels
from .conversion import delta_exact
from .divergences import as_alpha, gaussian_delta_eps
from .numerics import DEFAULT_TOL, Tolerance, find_root_monotone, integrate_adaptive

__all__ = [
    "TradeoffCurve",
    "RegionBoundary",
    "tau_grid",
    "DEFAULT_ALPHA_GRID",
    "DEFAULT_EPS_GRID",
    "gaussian_tradeoff",
    "approx_dp_boundary",
    "rdp_region_boundary",
    "kl_region_boundary",
    "region_intersect_over_alpha",
    "gaussian_region_exact",
    "gaussian_region_rdp_bound",
    "region_from_rdp_via_dp",
    "sgd_region_fdp",
    "sgd_region_rdp",
    "gdp_epsilon",
    "region_area",
    "sgd_area_difference",
    "rdp_from_tradeoff",
    "fdivergence_from_tradeoff",
]

_FD_STEP = 1e-6     # finite-difference step for sampled curves
_T_SPLIT = math.log(2.0)
_T_MAX = 690.0      # exp(-690) is still a normal double
_TINY = 1e-300

# Order grid for the Gaussian region intersection (the analytic alpha -> 1
# closure is added separately, so the grid only has to cover interior optima).
DEFAULT_ALPHA_GRID = tuple(np.unique(np.concatenate([
    1.0 + np.geomspace(0.05, 1.0, 10),
    np.geomspace(2.0, 512.0, 16),
])))

# Epsilon grid for intersecting approximate-DP supporting lines; 0 contributes
# the diagonal constraint, the rest are log-spaced sweep defaults.
DEFAULT_EPS_GRID = tuple(np.concatenate([[0.0], np.geomspace(1e-3, 20.0, 64)]))


def tau_grid(n: int = 1001) -> np.ndarray:
    """Default type I error grid: n uniform points on [1e-6, 1 - 1e-6]."""
    if n < 2:
        raise ValueError(f"grid needs at least 2 points, got {n}")
    return np.linspace(1e-6, 1.0 - 1e-6, n)


def _z_of_tau(tau: float) -> float:
    """Phi^{-1}(1 - tau), evaluated through whichever tail is small."""
    if tau <= 0.5:
        return -float(_ndtri(tau))
    return float(_ndtri(1.0 - tau))


@dataclass(frozen=True)
class TradeoffCurve:
    """Nonincreasing convex type I -> type II error curve with derivative access.

    `derivative_fn` may be omitted, in which case central finite differences
    with step 1e-6 are used (one-sided within two steps of the boundary).
    `complement_derivative_fn(v)` evaluates the slope at tau = 1 - v for tiny v,
    where double-precision tau cannot resolve the endpoint; curves without it
    fall back to plain derivative evaluation at clipped tau.
    """

    eval_fn: Callable[[float], float]
    beta_at_zero: float
    derivative_fn: Callable[[float], float] | None = None
    complement_derivative_fn: Callable[[float], float] | None = None

    def __call__(self, tau: float) -> float:
        return self.eval_fn(tau)

    def derivative(self, tau: float) -> float:
        if self.derivative_fn is not None:
            return self.derivative_fn(tau)
        h = _FD_STEP
        if tau < 2.0 * h:
            return (self.eval_fn(tau + h) - self.eval_fn(tau)) / h
        if tau > 1.0 - 2.0 * h:
            return (self.eval_fn(tau) - self.eval_fn(tau - h)) / h
        return (self.eval_fn(tau + h) - self.eval_fn(tau - h)) / (2.0 * h)

    def derivative_at_complement(self, v: float) -> float:
        if self.complement_derivative_fn is not None:
            return self.complement_derivative_fn(v)
        return self.derivative(min(1.0 - _FD_STEP, 1.0 - v))

    @classmethod
    def gaussian(cls, mu: float) -> "TradeoffCurve":
        """G_mu(tau) = Phi(Phi^{-1}(1 - tau) - mu), the Gaussian tradeoff curve."""
        if mu < 0.0:
            raise ValueError(f"mu must be >= 0, got {mu}")

        def ev(tau: float) -> float:
            if tau <= 0.0:
                return 1.0
            if tau >= 1.0:
                return 0.0
            return float(_ndtr(_z_of_tau(tau) - mu))

        def deriv(tau: float) -> float:
            tau = min(max(tau, 1e-290), 1.0 - 1e-16)
            z = _z_of_tau(tau)
            return -math.exp(mu * z - 0.5 * mu * mu)

        def cderiv(v: float) -> float:
            v = max(v, 1e-290)
            z = float(_ndtri(v))  # Phi^{-1}(1 - tau) at tau = 1 - v
            return -math.exp(mu * z - 0.5 * mu * mu)

        return cls(ev, 1.0, deriv, cderiv)

    @classmethod
    def from_approx_dp(cls, eps: float, delta: float) -> "TradeoffCurve":
        """Piecewise-linear boundary of the (eps, delta) approximate-DP region."""
        if eps < 0.0 or not 0.0 <= delta < 1.0:
            raise ValueError(f"invalid (eps, delta) = ({eps}, {delta})")
        e_eps = math.exp(eps)
        tau_kink = (1.0 - delta) / (e_eps + 1.0)
        tau_zero = 1.0 - delta

        def ev(tau: float) -> float:
            return max(0.0, 1.0 - delta - e_eps * tau, (1.0 - delta - tau) / e_eps)

        def deriv(tau: float) -> float:
            if tau < tau_kink:
                return -e_eps
            if tau < tau_zero:
                return -1.0 / e_eps
            return 0.0

        def cderiv(v: float) -> float:
            if v > 1.0 - tau_kink:
                return -e_eps
            if v > delta:
                return -1.0 / e_eps
            return 0.0

        return cls(ev, 1.0 - delta, deriv, cderiv)

    @classmethod
    def perfect(cls) -> "TradeoffCurve":
        """The full-privacy diagonal beta = 1 - tau."""
        return cls(lambda t: 1.0 - t, 1.0, lambda t: -1.0, lambda v: -1.0)

    @classmethod
    def from_samples(cls, taus: Sequence[float], betas: Sequence[float]) -> "TradeoffCurve":
        """Linear interpolant of sampled (tau, beta) pairs; derivatives by finite differences."""
        t = np.asarray(taus, dtype=np.float64)
        b = np.asarray(betas, dtype=np.float64)
        if t.shape != b.shape or t.ndim != 1 or t.size < 2:
            raise ValueError("need matching 1-d tau/beta arrays with at least 2 points")
        if np.any(np.diff(t) <= 0.0):
            raise ValueError("taus must be strictly increasing")
        ev = lambda tau: float(np.interp(tau, t, b))
        return cls(ev, ev(0.0))


@dataclass(frozen=True)
class RegionBoundary:
    """Sampled lower boundary of a privacy region on a tau grid."""

    taus: np.ndarray
    betas: np.ndarray

    def __post_init__(self):
        taus = np.asarray(self.taus, dtype=np.float64)
        betas = np.asarray(self.betas, dtype=np.float64)
        if taus.shape != betas.shape or taus.ndim != 1:
            raise ValueError("taus and betas must be 1-d arrays of the same length")
        if np.any(betas < -1e-12) or np.any(betas > 1.0 - taus + 1e-12):
            raise ValueError("betas must lie in [0, 1 - tau] pointwise")
        object.__setattr__(self, "taus", taus)
        object.__setattr__(self, "betas", betas)


def gaussian_tradeoff(mu: float, tau):
    """G_mu evaluated at a scalar or array of type I errors in [0, 1]."""
    if mu < 0.0:
        raise ValueError(f"mu must be >= 0, got {mu}")
    taus = np.asarray(tau, dtype=np.float64)
    if np.any((taus < 0.0) | (taus > 1.0)):
        raise ValueError("tau must lie in [0, 1]")
    inner = np.clip(taus, 1e-290, 1.0 - 1e-16)
    z = np.where(inner <= 0.5, -_ndtri(inner), _ndtri(1.0 - inner))
    out = _ndtr(z - mu)
    out = np.where(taus <= 0.0, 1.0, out)
    out = np.where(taus >= 1.0, 0.0, out)
    return float(out) if np.isscalar(tau) else out


def approx_dp_boundary(eps: float, delta: float, tau):
    """Lower boundary max{0, 1-d-e^e tau, e^-e (1-d-tau)} of the (eps, delta) region."""
    if eps < 0.0 or not 0.0 <= delta < 1.0:
        raise ValueError(f"invalid (eps, delta) = ({eps}, {delta})")
    taus = np.asarray(tau, dtype=np.float64)
    e_eps = math.exp(eps)
    out = np.maximum(0.0, np.maximum(1.0 - delta - e_eps * taus,
                                     (1.0 - delta - taus) / e_eps))
    return float(out) if np.isscalar(tau) else out


def _region_boundary_dispatch(alpha_sentinel: float, gamma: float, tau, warn: bool):
    if gamma < 0.0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    if np.isscalar(tau):
        t = float(tau)
        if warn and not kernels.TAU_CLIP <= t <= 1.0 - kernels.TAU_CLIP:
            warnings.warn(f"tau={t} clipped to [{kernels.TAU_CLIP}, {1.0 - kernels.TAU_CLIP}]")
        return float(kernels.region_boundary(alpha_sentinel, gamma, t))
    taus = np.ascontiguousarray(tau, dtype=np.float64)
    return kernels.region_boundary_batch(alpha_sentinel, gamma, taus)


def rdp_region_boundary(order, gamma: float, tau, tol: Tolerance = DEFAULT_TOL):
    """Smallest type II error compatible with the two order-alpha constraints
    d_alpha(1-tau || beta) <= gamma and d_alpha(1-beta || tau) <= gamma.

    Each constraint is inverted by bisection (run well past any representable
    tolerance, so `tol` never binds); gamma = 0 forces beta = 1 - tau.
    Accepts a scalar or an array of tau values.
    """
    del tol
    return _region_boundary_dispatch(as_alpha(order), gamma, tau, warn=True)


def kl_region_boundary(gamma: float, tau, tol: Tolerance = DEFAULT_TOL):
    """As rdp_region_boundary with the binary KL constraints (always a larger region)."""
    del tol
    return _region_boundary_dispatch(0.0, gamma, tau, warn=True)


def region_intersect_over_alpha(curve: RenyiCurve, alphas: Sequence[float], tau):
    """Boundary of the intersection of the order-wise regions at the given orders:
    the pointwise sup of rdp_region_boundary(alpha, curve.gamma(alpha), tau)."""
    alphas = list(alphas)
    if not alphas:
        raise ValueError("need at least one order")
    parts = [_region_boundary_dispatch(as_alpha(a), curve.gamma(float(a)), tau, warn=False)
             for a in alphas]
    if np.isscalar(tau):
        return max(parts)
    return np.maximum.reduce(parts)


def gaussian_region_exact(rho: float, T: int, tau):
    """Exact boundary G_{sqrt(2 rho T)} of the T-fold Gaussian privacy region."""
    if rho < 0.0 or T < 0:
        raise ValueError("rho and T must be nonnegative")
    return gaussian_tradeoff(math.sqrt(2.0 * rho * T), tau)


def gaussian_region_rdp_bound(rho: float, T: int, tau, alphas: Sequence[float] | None = None):
    """Boundary of the intersection of order-alpha regions with budgets alpha*rho*T
    over all orders above 1 (the tightest order-wise outer region for the Gaussian).

    The order -> 1 closure of the constraint family is exactly the binary KL
    constraint at budget rho*T, which no finite order grid reaches, so it is
    included analytically alongside the grid supremum.
    """
    if rho < 0.0 or T < 0:
        raise ValueError("rho and T must be nonnegative")
    grid = DEFAULT_ALPHA_GRID if alphas is None else tuple(alphas)
    rho_T = rho * T
    out = _region_boundary_dispatch(0.0, rho_T, tau, warn=False)
    curve = RenyiCurve(lambda a: rho_T * a)
    part = region_intersect_over_alpha(curve, grid, tau)
    if np.isscalar(tau):
        return max(out, part)
    return np.maximum(out, part)


def region_from_rdp_via_dp(order, gamma: float, tau, eps_grid: Sequence[float] | None = None):
    """Outer-bound boundary from approximate-DP supporting lines: the sup over the
    eps grid of approx_dp_boundary(eps, delta_exact(alpha, gamma, eps), tau)."""
    alpha = as_alpha(order)
    if gamma < 0.0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    grid = DEFAULT_EPS_GRID if eps_grid is None else tuple(eps_grid)
    if not grid:
        raise ValueError("eps grid must be nonempty")
    parts = []
    for eps in grid:
        d = 0.0 if gamma == 0.0 else delta_exact(alpha, gamma, float(eps)).value
        parts.append(approx_dp_boundary(float(eps), d, tau))
    if np.isscalar(tau):
        return max(parts)
    return np.maximum.reduce(parts)


def sgd_region_fdp(q: float, sigma: float, T: int, tau):
    """CLT tradeoff-curve baseline G_mu with mu = q sqrt(T (e^{1/sigma^2} - 1))."""
    if not 0.0 < q < 1.0 or not sigma > 0.0 or T < 0:
        raise ValueError(f"invalid subsampled parameters q={q}, sigma={sigma}, T={T}")
    mu = q * math.sqrt(T * math.expm1(1.0 / (sigma * sigma)))
    return gaussian_tradeoff(mu, tau)


def sgd_region_rdp(q: float, sigma: float, T: int, tau):
    """Region bound for T subsampled-Gaussian rounds: intersection over the
    admissible integer orders with budgets alpha * rho_q * T."""
    spec = subsampled_spec(q, sigma)
    curve = rdp_compose(subsampled_curve(spec), T)
    return region_intersect_over_alpha(curve, admissible_alphas(spec), tau)


def gdp_epsilon(mu: float, delta: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Smallest eps with gaussian_delta_eps(1/mu, eps) <= delta (mu-GDP to DP)."""
    if not mu > 0.0:
        raise ValueError(f"mu must be > 0, got {mu}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    sigma = 1.0 / mu
    if gaussian_delta_eps(sigma, 0.0) <= delta:
        return 0.0
    hi = 1.0
    for _ in range(200):
        if gaussian_delta_eps(sigma, hi) <= delta:
            break
        hi *= 2.0
    return find_root_monotone(lambda e: gaussian_delta_eps(sigma, e) - delta, 0.0, hi, tol)


def region_area(boundary, tol: Tolerance | None = None) -> float:
    """Area between the diagonal 1 - tau and a boundary (callable or RegionBoundary);
    0 for the diagonal itself, 0.5 for the axes."""
    if isinstance(boundary, RegionBoundary):
        taus, betas = boundary.taus, boundary.betas
        fn = lambda t: float(np.interp(t, taus, betas))
    elif callable(boundary):
        fn = boundary
    else:
        raise TypeError(f"boundary must be callable or RegionBoundary, got {type(boundary)}")
    return integrate_adaptive(lambda t: 1.0 - t - fn(t), 0.0, 1.0, tol)


def sgd_area_difference(q: float, sigma: float, T: int, tol: Tolerance | None = None) -> float:
    """Area of the CLT-baseline region minus area of the integer-order region bound;
    positive means the Renyi-derived bound is the tighter region."""
    if T == 0:
        return 0.0
    spec = subsampled_spec(q, sigma)
    orders = admissible_alphas(spec)
    rho_T = spec.rho_q * T

    def rdp_boundary(t: float) -> float:
        return max(kernels.region_boundary(float(a), a * rho_T, t) for a in orders)

    area_fdp = region_area(lambda t: sgd_region_fdp(q, sigma, T, t), tol)
    area_rdp = region_area(rdp_boundary, tol)
    return area_fdp - area_rdp


_QUAD_TOL = Tolerance(abs_tol=1e-9, rel_tol=1e-9)
_FLAT_SLOPE = 1e-250  # slopes below this are treated as an exactly flat segment


class _DivergentIntegral(Exception):
    pass


def _split_integral(curve: TradeoffCurve, of_slope: Callable[[float], float],
                    tol: Tolerance) -> float:
    """Integral of of_slope(|beta'(tau)|) over tau in (0, 1).

    Split at 1/2 with the substitutions tau = e^-t and 1 - tau = e^-t, which
    resolve endpoint-concentrated mass far beyond double resolution in tau;
    the right half queries the curve through its complement-side derivative.
    """
    def left(t: float) -> float:
        tau = math.exp(-t)
        return of_slope(abs(curve.derivative(tau))) * tau

    def right(t: float) -> float:
        v = math.exp(-t)
        return of_slope(abs(curve.derivative_at_complement(v))) * v

    return (integrate_adaptive(left, _T_SPLIT, _T_MAX, tol, eta=1e-10)
            + integrate_adaptive(right, _T_SPLIT, _T_MAX, tol, eta=1e-10))


def rdp_from_tradeoff(curve: TradeoffCurve, order, tol: Tolerance | None = None) -> float:
    """Renyi divergence certified by a tradeoff curve:
    log(1 - beta(0) + integral of |beta'(tau)|^(1-alpha)) / (alpha - 1).

    Infinite when the integral diverges (e.g. the curve goes flat before tau = 1).
    """
    alpha = as_alpha(order)
    tol = _QUAD_TOL if tol is None else tol

    def of_slope(m: float) -> float:
        if m <= _FLAT_SLOPE:
            raise _DivergentIntegral  # flat segment: unbounded likelihood ratio
        return math.exp((1.0 - alpha) * math.log(m))

    try:
        integral = _split_integral(curve, of_slope, tol)
    except _DivergentIntegral:
        return math.inf
    arg = 1.0 - curve.beta_at_zero + integral
    if math.isinf(arg):
        return math.inf
    if not arg > 0.0:
        raise ValueError(f"curve violates tradeoff invariants: 1 - beta(0) + integral = {arg}")
    return math.log(arg) / (alpha - 1.0)


def fdivergence_from_tradeoff(curve: TradeoffCurve, f_eval: Callable[[float], float],
                              tol: Tolerance | None = None) -> float:
    """f-divergence certified by a tradeoff curve: integral of
    |beta'(tau)| f(1/|beta'(tau)|) over (0, 1).

    `f_eval` must be convex with f(1) = 0 (not checked here); curves with an
    atom at beta(0) < 1 contribute only through the integral, matching the
    formula as stated.
    """
    tol = _QUAD_TOL if tol is None else tol

    def of_slope(m: float) -> float:
        m = max(m, _TINY)
        return m * f_eval(1.0 / m)

    return _split_integral(curve, of_slope, tol)
