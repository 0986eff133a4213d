"""Coupled products of Ginibre matrices: sampling, exact and limiting kernels."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    DomainError,
    EmptyGrid,
    LogSpaceOverflow,
    NonConvergence,
    NumericalRankError,
    PoleError,
    ProdMatrixError,
    QuadratureFailure,
    SeparationError,
    SignError,
)
from .kernel_finite import (  # noqa: E402
    KernelRequest,
    correlation_function,
    kernel_contour,
    kernel_contour_grid,
    kernel_sum,
    kernel_sum_grid,
)
from .kernel_limit import (  # noqa: E402
    Interpolating,
    LimitRegime,
    Strong,
    Weak,
    bessel_kernel_closed_form,
    kernel_ginibre_infinite,
    kernel_interpolating,
    verify_scaling_limit,
)
from .model import ModelConfig, RngStream, sample_configurations  # noqa: E402
