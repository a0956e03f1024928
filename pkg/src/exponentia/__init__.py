"""Error exponents and exponent-constrained rates for wideband AWGN and block-fading channels."""

from .constellation import (
    Constellation,
    PeakConstraint,
    SignalingScheme,
    check_peak,
    is_symmetric,
    make_custom,
    make_psk,
    pairwise_moment,
)
from .errors import (
    ConvergenceError,
    DomainError,
    ExponentiaError,
    IntegrationError,
    UnsupportedInputError,
    ValidationError,
)
from .fading import (
    FadingAsymptotes,
    FadingSpec,
    eo_fading_iid,
    ergodic_capacity,
    fading_asymptotes,
    fading_rate,
    fading_rate_curve,
    fading_slope_fit,
)
from .gallager import (
    AlphaKernel,
    ExponentResult,
    critical_rate,
    eo,
    eo_fixed_beta,
    infinite_bandwidth_reliability,
    kuhn_tucker_residual,
    mutual_information,
    random_coding_exponent,
    sphere_packing_exponent,
)
from .quadrature import (
    GaussQuadratureRule,
    OracleGrid,
    expect_complex_gaussian,
    expect_unit_exponential,
    hermite_rule,
    laguerre_rule,
    oracle_expect_complex_gaussian,
)
from .wideband_awgn import (
    Asymptotes,
    ChannelParams,
    WidebandCurve,
    awgn_asymptotes,
    first_order_optimality_check,
    fit_limit_and_slope,
    rate_curve,
    rate_per_symbol,
    spectral_efficiency_curve,
)

__version__ = "0.1.0"
