"""Robust projective measurement with code-inspired commuting observables."""

__version__ = "0.1.0"

from .codes import ClassicalCode, build_c6, decode_nearest
from .observables import ProjectivePOVM, QuantumState, build_observables
from .server import main

__all__ = [
    "ClassicalCode",
    "ProjectivePOVM",
    "QuantumState",
    "build_c6",
    "build_observables",
    "decode_nearest",
    "main",
]
