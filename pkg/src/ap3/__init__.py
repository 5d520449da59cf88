"""Executable toolkit for sets without three-term arithmetic progressions."""

from .errors import DomainRefusal, NotAPFree, TheoremViolation
from .groups import AmbientGroup, Interval, SiteSet, parse_siteset, emit_siteset, vector_set

__all__ = [
    "AmbientGroup",
    "DomainRefusal",
    "Interval",
    "NotAPFree",
    "SiteSet",
    "TheoremViolation",
    "emit_siteset",
    "parse_siteset",
    "vector_set",
]
__version__ = "0.1.0"
