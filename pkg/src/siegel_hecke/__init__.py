"""Certified numerical Hecke eigenvalues of degree-2 Siegel modular eigenforms.

The package evaluates truncated Fourier expansions of the classical Igusa
generators at points of the Siegel upper half-space in rectangular interval
arithmetic, applies Hecke operators through explicit coset representatives,
and certifies eigenvalues as quotients of enclosures.
"""

__version__ = "0.1.0"

from .boxes import BoxField, ComplexBox, RealInterval
from .cache import SeriesStore
from .catalog import (
    CatalogError,
    EigenformSpec,
    builtin_catalog,
    catalog_form,
    parse_eigenform,
    serialize_eigenform,
)
from .engine import (
    CertificationError,
    EigenvalueResult,
    eigenvalue,
    snap_to_integer,
)

__all__ = [
    "BoxField",
    "CatalogError",
    "CertificationError",
    "ComplexBox",
    "EigenformSpec",
    "EigenvalueResult",
    "RealInterval",
    "SeriesStore",
    "builtin_catalog",
    "catalog_form",
    "eigenvalue",
    "parse_eigenform",
    "serialize_eigenform",
    "snap_to_integer",
    "__version__",
]
