"""Prime sums and products, primorial extremes of psi(N)/N, and Robin-type checks."""

from .arithfun import (
    ExactRatio,
    FactoredInteger,
    divisor_sum_decomposition,
    factorize,
    phi_inverse_ratio,
    psi_ratio,
    ramanujan_partial_sigma,
    ramanujan_sum,
    sigma_ratio,
)
from .constants import euler_gamma, mertens_constant, named_constants
from .ddarith import DD, PrecisionSum, format_real
from .errors import CheckpointError, PrecisionInfeasibleError, ResourceLimitError
from .extrema import (
    Inequality,
    InequalityReport,
    PrimorialRecord,
    Verdict,
    ca_stream,
    check_nicolas,
    check_psi_theorem1,
    check_robin,
    corollary5_residuals,
    primorial_stream,
    scan,
)
from .products import (
    Quantity,
    ResidualRecord,
    mertens_product,
    prime_harmonic_sum,
    psi_product,
    residual_record,
    residual_scan,
)
from .sieve import SieveSegment, nth_prime, prime_stats, primes_up_to, segment_iter

__version__ = "0.1.0"

__all__ = [
    "ExactRatio",
    "FactoredInteger",
    "divisor_sum_decomposition",
    "factorize",
    "phi_inverse_ratio",
    "psi_ratio",
    "ramanujan_partial_sigma",
    "ramanujan_sum",
    "sigma_ratio",
    "euler_gamma",
    "mertens_constant",
    "named_constants",
    "DD",
    "PrecisionSum",
    "format_real",
    "CheckpointError",
    "PrecisionInfeasibleError",
    "ResourceLimitError",
    "Inequality",
    "InequalityReport",
    "PrimorialRecord",
    "Verdict",
    "ca_stream",
    "check_nicolas",
    "check_psi_theorem1",
    "check_robin",
    "corollary5_residuals",
    "primorial_stream",
    "scan",
    "Quantity",
    "ResidualRecord",
    "mertens_product",
    "prime_harmonic_sum",
    "psi_product",
    "residual_record",
    "residual_scan",
    "SieveSegment",
    "nth_prime",
    "prime_stats",
    "primes_up_to",
    "segment_iter",
]
