"""Spectra, low energy and spectral bounds of A_alpha matrices of digraphs."""
from .alpha import Alpha, as_alpha, parse_alpha
from .bounds import BoundId, BoundReport, bound_report, equality_witness
from .digraph import Digraph, parse_digraph, serialize_digraph
from .spectral import (
    AlphaMatrix,
    NormalityVerdict,
    Spectrum,
    build_alpha_matrix,
    eigenvalues,
    is_normal_algebraic,
    is_normal_topological,
    low_energy,
    spectral_radius,
)

__all__ = [
    "Alpha",
    "AlphaMatrix",
    "BoundId",
    "BoundReport",
    "Digraph",
    "NormalityVerdict",
    "Spectrum",
    "as_alpha",
    "bound_report",
    "build_alpha_matrix",
    "eigenvalues",
    "equality_witness",
    "is_normal_algebraic",
    "is_normal_topological",
    "low_energy",
    "parse_alpha",
    "parse_digraph",
    "serialize_digraph",
    "spectral_radius",
]
