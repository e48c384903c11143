"""Spectral calculus for the Grushin operator G = -Laplacian - |x|^2 d_t^2.

The operator diagonalizes jointly: a Fourier transform in t and, per nonzero
frequency lam, the scaled Hermite basis in x with eigenvalues (2k+n)|lam|.
On top of that calculus the package provides Riesz transforms, scalar
multipliers, Bochner-Riesz means, Littlewood-Paley square functions, and an
empirical lab that probes the L^p-boundedness and R-boundedness claims those
operators are known to satisfy.
"""

__version__ = "0.1.0"

from .errors import (
    CapabilityError,
    ConfigError,
    DataError,
    DomainError,
    EvaluationError,
    FormatError,
    GrushinError,
    TruncationError,
)
from .hermite import (
    HermiteSlice,
    MultiIndex,
    QuadratureRule,
    gauss_hermite_rule,
    hermite_analyze,
    hermite_eval,
    hermite_functions,
    hermite_synthesize,
    ladder_apply,
    mehler_kernel,
)
from .transform import (
    DilationParams,
    GridFunction,
    GridSpec,
    SpectralCoefficients,
    apply_grushin,
    forward_transform,
    inverse_transform,
    nonisotropic_dilate,
)
from .calculus import (
    HormanderReport,
    ScalarSymbol,
    apply_scalar_multiplier,
    fractional_power_apply,
    hormander_check,
    named_symbol,
)
from .riesz import (
    HigherRieszSpec,
    RieszSpec,
    cz_profile,
    higher_riesz_apply,
    riesz_apply,
    riesz_kernel_eval,
    shifted_power_apply,
)
from .bochner import (
    MaximalProfile,
    RieszMeanSpec,
    bochner_riesz_apply,
    hardy_littlewood_maximal,
    hermite_bochner_riesz,
    maximal_domination_check,
)
from .gfunc import (
    GFunctionSpec,
    g_k_eval,
    g_norm_equivalence_report,
    g_star_eval,
)
from .normlab import (
    NormReport,
    TestFunctionSpec,
    lp_norm,
    make_test_function,
    operator_norm_probe,
    r_bound_probe,
)
