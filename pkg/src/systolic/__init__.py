"""Finite checks for systolic simplicial complexes: k-largeness, balls and
spheres, projections between spheres, boundary inverse systems and the
surface stages of the Pontryagin sphere."""

__version__ = "0.1.0"

from .complex import (  # noqa: E402
    SimplicialComplex,
    Subcomplex,
    barycentric_subdivision,
    is_chamber_complex,
    is_flag,
    is_full_subcomplex,
    is_k_large,
    is_locally_k_large,
    link,
)
from .report import CheckReport  # noqa: E402

__all__ = [
    "CheckReport",
    "SimplicialComplex",
    "Subcomplex",
    "barycentric_subdivision",
    "is_chamber_complex",
    "is_flag",
    "is_full_subcomplex",
    "is_k_large",
    "is_locally_k_large",
    "link",
]
