"""dpconv: lossless conversions between approximate DP, Renyi DP, and hypothesis-test DP.

Composition accounting for (subsampled) Gaussian mechanisms built on the tight
Renyi-to-DP conversion, plus privacy-region bounds and curve integrals. Hot
kernels are numba-jitted with a pure-numpy fallback (DPCONV_BACKEND=numpy).
"""

from .backend import BACKEND
from .numerics import (
    BracketError,
    DEFAULT_TOL,
    IterationLimitError,
    Tolerance,
    ToleranceNotMetError,
    find_root_monotone,
    integrate_adaptive,
    log_sum_exp,
    minimize_convex_scalar,
    normal_cdf,
    normal_cdf_inverse,
)
from .divergences import (
    BinaryDistributionPair,
    RenyiOrder,
    chi_alpha_binary,
    chi_inverse,
    chi_of_gamma,
    gaussian_delta_eps,
    gaussian_renyi,
    hockey_stick_binary,
    kl_binary,
    renyi_binary,
)
from .conversion import (
    ApproxDPPoint,
    ConversionResult,
    RenyiPoint,
    abadi_delta,
    delta_exact,
    epsilon_exact,
    epsilon_upper_bound,
    gamma_exact,
    gamma_exact_batch,
    gamma_lower_bound,
    h1_objective,
    zero_epsilon_range,
    zeta_alpha,
)
from .accountant import (
    CompositionQuery,
    GaussianMechanismSpec,
    RenyiCurve,
    SubsampledGaussianSpec,
    admissible_alphas,
    gaussian_curve,
    improved_calibrate_sigma,
    improved_epsilon,
    ma_calibrate_sigma,
    ma_gaussian_epsilon,
    rdp_compose,
    sgd_epsilon,
    subsampled_curve,
    subsampled_spec,
)
from .tradeoff import (
    DEFAULT_ALPHA_GRID,
    DEFAULT_EPS_GRID,
    RegionBoundary,
    TradeoffCurve,
    approx_dp_boundary,
    fdivergence_from_tradeoff,
    gaussian_region_exact,
    gaussian_region_rdp_bound,
    gaussian_tradeoff,
    gdp_epsilon,
    kl_region_boundary,
    rdp_from_tradeoff,
    rdp_region_boundary,
    region_area,
    region_from_rdp_via_dp,
    region_intersect_over_alpha,
    sgd_area_difference,
    sgd_region_fdp,
    sgd_region_rdp,
    tau_grid,
)

__version__ = "0.1.0"
