"""Dunkl heat flows: transforms, fractional semigroups and long-time asymptotics."""

__version__ = "0.1.0"

from .core import GridFunction, ReflectionConfig, dunkl_inverse_transform, dunkl_transform, make_grid  # noqa: E402
from .errors import DomainError, TruncationError  # noqa: E402
from .heat import KernelSpec, frac_heat_kernel, heat_kernel, semigroup_apply  # noqa: E402

__all__ = [
    "DomainError", "GridFunction", "KernelSpec", "ReflectionConfig", "TruncationError",
    "dunkl_inverse_transform", "dunkl_transform", "frac_heat_kernel", "heat_kernel", "make_grid",
    "semigroup_apply", "__version__",
]
