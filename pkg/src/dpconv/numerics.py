"""Scalar special functions, optimization, root finding, and quadrature.

Everything in this module is pure and reentrant: no state is shared between
calls, so any function may be used concurrently from multiple threads.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterable

from scipy.special import ndtri as _ndtri

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "BracketError",
    "IterationLimitError",
    "ToleranceNotMetError",
    "normal_cdf",
    "normal_cdf_inverse",
    "log_sum_exp",
    "minimize_convex_scalar",
    "find_root_monotone",
    "integrate_adaptive",
]

_SQRT2 = math.sqrt(2.0)
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0  # golden-section contraction ratio


class BracketError(ValueError):
    """Raised when a root finder is handed an interval that does not bracket a sign change."""


class IterationLimitError(RuntimeError):
    """Raised when an iterative solver hits its iteration cap before converging."""


class ToleranceNotMetError(RuntimeError):
    """Quadrature could not reach the requested tolerance.

    Carries the best available estimate so callers can decide whether the
    partial answer is usable.
    """

    def __init__(self, message: str, best_estimate: float, error_bound: float,
                 clipped_bound: float = 0.0):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_bound = error_bound
        self.clipped_bound = clipped_bound


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative tolerance plus an iteration cap for the solvers here."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-12
    max_iters: int = 200

    def __post_init__(self):
        if not self.abs_tol > 0.0:
            raise ValueError(f"abs_tol must be > 0, got {self.abs_tol}")
        if self.rel_tol < 0.0:
            raise ValueError(f"rel_tol must be >= 0, got {self.rel_tol}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")


DEFAULT_TOL = Tolerance()


def normal_cdf(x: float) -> float:
    """Standard normal CDF. +/-inf map to 1/0; accurate to well below 1e-12 on |x| <= 8."""
    if math.isinf(x):
        return 1.0 if x > 0 else 0.0
    return 0.5 * math.erfc(-x / _SQRT2)


def normal_cdf_inverse(u: float) -> float:
    """Inverse standard normal CDF on the open interval (0, 1)."""
    if not 0.0 < u < 1.0:
        raise ValueError(f"normal_cdf_inverse requires u in (0, 1), got {u}")
    return float(_ndtri(u))


def log_sum_exp(terms: Iterable[float]) -> float:
    """log(sum(exp(t))) without overflow; -inf entries contribute nothing."""
    ts = list(terms)
    if not ts:
        raise ValueError("log_sum_exp needs at least one term")
    m = max(ts)
    if m == -math.inf:
        return -math.inf
    if math.isinf(m):
        return m
    return m + math.log(sum(math.exp(t - m) for t in ts))


def minimize_convex_scalar(objective: Callable[[float], float], lo: float, hi: float,
                           tol: Tolerance = DEFAULT_TOL) -> tuple[float, float]:
    """Golden-section minimization of a convex (or unimodal) objective on (lo, hi).

    The objective is never evaluated at the endpoints themselves, so it may
    diverge there; an infimum attained at an endpoint is reported with the
    argmin clamped just inside the interval.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    a, b = lo, hi
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1 = objective(x1)
    f2 = objective(x2)
    best_x, best_f = (x1, f1) if f1 <= f2 else (x2, f2)
    width_tol = max(tol.abs_tol, tol.rel_tol * max(abs(lo), abs(hi)))
    it = 0
    while (b - a) > width_tol:
        if it >= tol.max_iters:
            raise IterationLimitError(
                f"interval still {b - a:.3e} wide after {tol.max_iters} iterations")
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = objective(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = objective(x2)
        if f1 < best_f:
            best_x, best_f = x1, f1
        if f2 < best_f:
            best_x, best_f = x2, f2
        it += 1
    x = min(max(best_x, lo + tol.abs_tol), hi - tol.abs_tol)
    return x, best_f


def find_root_monotone(fn: Callable[[float], float], lo: float, hi: float,
                       tol: Tolerance = DEFAULT_TOL) -> float:
    """Bisection root of a monotone function whose signs at lo/hi bracket zero."""
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    f_lo = fn(lo)
    f_hi = fn(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if math.copysign(1.0, f_lo) == math.copysign(1.0, f_hi):
        raise BracketError(f"fn({lo})={f_lo:.3e} and fn({hi})={f_hi:.3e} do not bracket 0")
    increasing = f_lo < 0.0
    for _ in range(tol.max_iters):
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        if abs(f_mid) <= tol.abs_tol or (hi - lo) <= max(tol.abs_tol, tol.rel_tol * abs(mid)):
            return mid
        if (f_mid < 0.0) == increasing:
            lo = mid
        else:
            hi = mid
    raise IterationLimitError(f"no convergence within {tol.max_iters} bisection steps")


# Gauss-Kronrod 7/15 nodes on [-1, 1]. The first seven rows are the Gauss
# points and carry both a Gauss and a Kronrod weight.
_GK15 = (
    (0.000000000000000e+00, 4.179591836734694e-01, 2.094821410847278e-01),
    (+4.058451513773972e-01, 3.818300505051189e-01, 1.903505780647854e-01),
    (-4.058451513773972e-01, 3.818300505051189e-01, 1.903505780647854e-01),
    (+7.415311855993945e-01, 2.797053914892767e-01, 1.406532597155259e-01),
    (-7.415311855993945e-01, 2.797053914892767e-01, 1.406532597155259e-01),
    (+9.491079123427585e-01, 1.294849661688697e-01, 6.309209262997855e-02),
    (-9.491079123427585e-01, 1.294849661688697e-01, 6.309209262997855e-02),
    (+2.077849550078985e-01, 0.0, 2.044329400752989e-01),
    (-2.077849550078985e-01, 0.0, 2.044329400752989e-01),
    (+5.860872354676911e-01, 0.0, 1.690047266392679e-01),
    (-5.860872354676911e-01, 0.0, 1.690047266392679e-01),
    (+8.648644233597691e-01, 0.0, 1.047900103222502e-01),
    (-8.648644233597691e-01, 0.0, 1.047900103222502e-01),
    (+9.914553711208126e-01, 0.0, 2.293532201052922e-02),
    (-9.914553711208126e-01, 0.0, 2.293532201052922e-02),
)


def _gk15_panel(fn, a: float, b: float) -> tuple[float, float]:
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    gauss = 0.0
    kronrod = 0.0
    for x, wg, wk in _GK15:
        v = fn(c + h * x)
        gauss += wg * v
        kronrod += wk * v
    return kronrod * h, abs(kronrod - gauss) * h


def _dyadic_breakpoints(a: float, b: float, eta: float) -> list[float]:
    # Panels shrink geometrically toward each endpoint so that integrable
    # endpoint singularities are resolved without thousands of refinements.
    pts = {a, b}
    w = b - a
    f = 0.5
    while w * f > eta:
        pts.add(a + w * f)
        pts.add(b - w * f)
        f *= 0.5
    return sorted(pts)


def integrate_adaptive(fn: Callable[[float], float], lo: float, hi: float,
                       tol: Tolerance | None = None, eta: float = 1e-10,
                       max_segments: int = 20000) -> float:
    """Globally adaptive Gauss-Kronrod quadrature of fn over (lo, hi).

    The endpoints are approached by clipping to [lo+eta, hi-eta]; a bound on
    the clipped mass, eta*(|f(lo+eta)| + |f(hi-eta)|), is reported through
    ToleranceNotMetError when the requested tolerance cannot be certified.
    Convergence requires the quadrature error estimate to drop below
    max(tol.abs_tol, tol.rel_tol * |integral|).
    """
    if tol is None:
        tol = Tolerance(abs_tol=1e-9, rel_tol=1e-9)
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    a = lo + eta
    b = hi - eta
    if not a < b:
        raise ValueError(f"interval narrower than 2*eta={2 * eta}")
    clipped = eta * (abs(fn(a)) + abs(fn(b)))

    heap: list[tuple[float, float, float, float, float]] = []
    total = 0.0
    err = 0.0
    n = 0
    points = _dyadic_breakpoints(a, b, eta)
    for x0, x1 in zip(points[:-1], points[1:]):
        seg_i, seg_e = _gk15_panel(fn, x0, x1)
        heapq.heappush(heap, (-seg_e, x0, x1, seg_i, seg_e))
        total += seg_i
        err += seg_e
        n += 1

    def target() -> float:
        return max(tol.abs_tol, tol.rel_tol * abs(total))

    while err > target() and n < max_segments:
        _, sa, sb, seg_i, seg_e = heapq.heappop(heap)
        m = 0.5 * (sa + sb)
        i1, e1 = _gk15_panel(fn, sa, m)
        i2, e2 = _gk15_panel(fn, m, sb)
        total += i1 + i2 - seg_i
        err += e1 + e2 - seg_e
        heapq.heappush(heap, (-e1, sa, m, i1, e1))
        heapq.heappush(heap, (-e2, m, sb, i2, e2))
        n += 1

    if err > target():
        raise ToleranceNotMetError(
            f"quadrature error {err:.3e} above target {target():.3e} "
            f"after {n} segments",
            best_estimate=total, error_bound=err, clipped_bound=clipped)
    return total
