"""Gauge diagnostics and zero distribution of normalized power-series sections."""
from .kernel import DEFAULT_PRECISION, DomainError, NumericFailure
from .sections import Mode, build, strip_origin
from .series import FAMILIES, make_family

__all__ = ["DEFAULT_PRECISION", "DomainError", "NumericFailure", "Mode", "build", "strip_origin", "FAMILIES", "make_family"]
__version__ = "0.1.0"
