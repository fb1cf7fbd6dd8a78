"""Adaptive quantization matrices for block-transform video coding.

The package builds perceptual frequency weighting matrices from a lowpass
contrast sensitivity model, adapts them to the resolution of a target display,
turns them into integer quantization matrices and scaling-list files, and
ships a small DCT codec harness for measuring what the matrices do to
reconstruction quality.
"""

from aqm.adapt import (
    DisplayGeometry,
    ExponentField,
    adapt_fwm,
    display_parameter,
    exponent_field,
    normalized_distance,
)
from aqm.csf import (
    CsfParams,
    FrequencyWeightingMatrix,
    angular_symmetry,
    build_fwm,
    discrete_frequencies,
    mtf,
    radial_frequency_cpd,
)
from aqm.qm import (
    InterModelParams,
    QuantizationMatrix,
    adaptive_matrices,
    default_matrices,
    derive_inter,
    derive_qm,
    replicate,
)

__version__ = "0.1.0"

__all__ = [
    "CsfParams",
    "FrequencyWeightingMatrix",
    "DisplayGeometry",
    "ExponentField",
    "InterModelParams",
    "QuantizationMatrix",
    "adapt_fwm",
    "adaptive_matrices",
    "angular_symmetry",
    "build_fwm",
    "default_matrices",
    "derive_inter",
    "derive_qm",
    "discrete_frequencies",
    "display_parameter",
    "exponent_field",
    "mtf",
    "normalized_distance",
    "radial_frequency_cpd",
    "replicate",
]
