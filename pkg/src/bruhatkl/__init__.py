"""Exact Kazhdan-Lusztig polynomials, Bruhat intervals and special
matchings for doubly laced and dihedral Coxeter groups."""

from .coxeter import (
    CoxeterSystem,
    Element,
    QuotientMembershipError,
    genset,
    genset_indices,
    parse_genset,
    format_genset,
)

__version__ = "0.1.0"

__all__ = [
    "CoxeterSystem",
    "Element",
    "QuotientMembershipError",
    "genset",
    "genset_indices",
    "parse_genset",
    "format_genset",
    "__version__",
]
