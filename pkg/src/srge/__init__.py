"""Generalized charged moments of the compact boson and their XX-chain counterparts."""

__version__ = "0.1.0"

from .core_types import (  # noqa: E402
    BosonState,
    ChiralModeList,
    Geometry,
    ModelParams,
    ModulatedPolynomial,
    format_state,
    parse_state,
)
from .moments_n1 import N1Request, f1_chiral, f1_excited_diagonal, f1_full  # noqa: E402
from .moments_n2 import N2Request, f2_chiral, f2_chiral_half, f2_full  # noqa: E402

__all__ = [
    "BosonState",
    "ChiralModeList",
    "Geometry",
    "ModelParams",
    "ModulatedPolynomial",
    "N1Request",
    "N2Request",
    "f1_chiral",
    "f1_excited_diagonal",
    "f1_full",
    "f2_chiral",
    "f2_chiral_half",
    "f2_full",
    "format_state",
    "parse_state",
]
