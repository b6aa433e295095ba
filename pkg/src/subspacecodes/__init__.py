"""Exact tools for constant-dimension subspace codes over small prime fields."""

from .codes import CodeParams, SubspaceCode, dimension_distribution, emit_code, orthogonal_code, parse_code, shorten, verify
from .errors import SubspaceCodesError
from .grassmann import Subspace, enumerate_subspaces, gaussian_binomial, subspace_distance

__all__ = [
    "CodeParams",
    "Subspace",
    "SubspaceCode",
    "SubspaceCodesError",
    "dimension_distribution",
    "emit_code",
    "enumerate_subspaces",
    "gaussian_binomial",
    "orthogonal_code",
    "parse_code",
    "shorten",
    "subspace_distance",
    "verify",
]
__version__ = "0.1.0"
