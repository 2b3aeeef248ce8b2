"""Forward and inverse first-passage problems for drifted Brownian motion
with a holding and jumping boundary at 0."""

from .transforms import (
    DomainError,
    DriftParams,
    TransformFn,
    forward_fpt_lt,
    forward_fpt_lt_sym0,
    forward_fpt_lt_nohold,
    inverse_g_lt,
    inverse_g_lt_nohold,
    mean_fpt,
)
from .densities import JumpDensity, by_name, catalog
from .inversion import InversionConfig, ValidityReport, cdf_from_lt, check_density, invert

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "DriftParams",
    "TransformFn",
    "forward_fpt_lt",
    "forward_fpt_lt_sym0",
    "forward_fpt_lt_nohold",
    "inverse_g_lt",
    "inverse_g_lt_nohold",
    "mean_fpt",
    "JumpDensity",
    "by_name",
    "catalog",
    "InversionConfig",
    "ValidityReport",
    "cdf_from_lt",
    "check_density",
    "invert",
]
