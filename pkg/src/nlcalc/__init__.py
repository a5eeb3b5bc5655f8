"""Nonlocal derivative ``D u(t) = int alpha_eps(s) u(t + s) ds`` and its inverse."""

__version__ = "0.1.0"

from .kernels import (  # noqa: E402
    AdmissibilityReport,
    CheckConfig,
    KernelProfile,
    ScaledKernel,
    builtin_kernel,
    check_admissibility,
    moment,
    scale,
)
from .spectral import ZeroSet, find_zeros, spectrum, transform  # noqa: E402
from .derivative import GridFunction, QuadratureConfig, apply, taylor_bound, weak_pairing  # noqa: E402
from .antiderivative import (  # noqa: E402
    AntiderivativeResult,
    SolverConfig,
    closed_form_reference,
    homogeneous_basis,
    smoothness_shift,
    solve,
)
from .convergence_lab import SweepReport  # noqa: E402

__all__ = [
    "__version__",
    "AdmissibilityReport",
    "CheckConfig",
    "KernelProfile",
    "ScaledKernel",
    "builtin_kernel",
    "check_admissibility",
    "moment",
    "scale",
    "ZeroSet",
    "find_zeros",
    "spectrum",
    "transform",
    "GridFunction",
    "QuadratureConfig",
    "apply",
    "taylor_bound",
    "weak_pairing",
    "AntiderivativeResult",
    "SolverConfig",
    "closed_form_reference",
    "homogeneous_basis",
    "smoothness_shift",
    "solve",
    "SweepReport",
]
