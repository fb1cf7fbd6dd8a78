"""Lowpass contrast sensitivity weighting for an N×N transform block.

Each coefficient position (i, j) is mapped to a radial spatial frequency in
cycles per degree, normalised by an angular (oblique-effect) factor, and passed
through a modulation transfer function that is clamped to 1.0 below a cutoff
frequency. The result is the base frequency weighting matrix (FWM) from which
the default intra quantization matrix is derived.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CsfParams",
    "FrequencyWeightingMatrix",
    "discrete_frequencies",
    "radial_frequency_cpd",
    "angular_symmetry",
    "mtf",
    "build_fwm",
]


@dataclass(frozen=True)
class CsfParams:
    """Constants of the CSF/MTF model plus the matrix dimension.

    ``dot_pitch`` and ``viewing_distance`` are in millimetres, ``f_max`` in
    cycles per degree.
    """

    a: float = 2.2
    b: float = 0.192
    c: float = 0.114
    d: float = 1.1
    dot_pitch: float = 0.25
    viewing_distance: float = 512.0
    symmetry: float = 0.7
    f_max: float = 8.0
    n: int = 8

    def __post_init__(self):
        if not self.dot_pitch > 0:
            raise ValueError(f"dot_pitch must be positive, got {self.dot_pitch}")
        if not self.viewing_distance > 0:
            raise ValueError(
                f"viewing_distance must be positive, got {self.viewing_distance}"
            )
        if not 0 < self.symmetry <= 1:
            raise ValueError(f"symmetry must be in (0, 1], got {self.symmetry}")
        if not self.f_max > 0:
            raise ValueError(f"f_max must be positive, got {self.f_max}")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")


@dataclass(frozen=True)
class FrequencyWeightingMatrix:
    """N×N perceptual weights in (0, 1], (0, 0) being the DC position.

    ``kind`` is ``"base"`` for H and ``"adapted"`` for the display-adapted H'.
    """

    values: np.ndarray = field(repr=False)
    kind: str = "base"

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"FWM must be square, got shape {values.shape}")
        if self.kind not in ("base", "adapted"):
            raise ValueError(f"unknown FWM kind {self.kind!r}")
        if not (np.all(values > 0) and np.all(values <= 1.0)):
            raise ValueError("FWM weights must lie in (0, 1]")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, index):
        return self.values[index]


def discrete_frequencies(params: CsfParams) -> np.ndarray:
    """Horizontal (equivalently vertical) frequencies in cycles/mm.

    Index ``k`` of the result holds ``k / (2 * N * dot_pitch)``, so entry 0 is
    DC and entry ``N - 1`` is the highest frequency the block represents.
    """
    n = params.n
    return np.arange(n, dtype=np.float64) / (params.dot_pitch * 2 * n)


def _mm_per_degree(viewing_distance: float) -> float:
    return math.pi / (180.0 * math.asin(1.0 / math.sqrt(1.0 + viewing_distance**2)))


def radial_frequency_cpd(fu, fv, viewing_distance: float):
    """Radial frequency in cycles per degree of visual angle.

    ``fu`` and ``fv`` are in cycles/mm and may be scalars or arrays.
    """
    if not viewing_distance > 0:
        raise ValueError(f"viewing_distance must be positive, got {viewing_distance}")
    return _mm_per_degree(viewing_distance) * np.hypot(fu, fv)


def angular_symmetry(fu, fv, s: float):
    """Oblique-effect factor S(theta), theta = arctan(fu / fv).

    At fv == 0 theta is taken as pi/2 (pure vertical frequency) and as 0 at DC.
    Both conventions are harmless since cos(4 theta) is symmetric about pi/4.
    """
    if not 0 < s <= 1:
        raise ValueError(f"symmetry must be in (0, 1], got {s}")
    # arctan2 with non-negative arguments gives exactly the conventions above
    theta = np.arctan2(fu, fv)
    return (1.0 - s) / 2.0 * np.cos(4.0 * theta) + (1.0 + s) / 2.0


def mtf(f_prime, params: CsfParams):
    """Lowpass MTF evaluated at normalised frequency ``f_prime`` (cpd).

    Frequencies at or below ``params.f_max`` map to 1.0; above it the
    Mannos-Sakrison form ``a (b + c f') exp(-(c f')**d)`` applies.
    """
    f_prime = np.asarray(f_prime, dtype=np.float64)
    if np.any(f_prime < 0):
        raise ValueError("normalised frequency must be non-negative")
    p = params
    roll_off = p.a * (p.b + p.c * f_prime) * np.exp(-((p.c * f_prime) ** p.d))
    out = np.where(f_prime > p.f_max, roll_off, 1.0)
    return out[()] if out.ndim == 0 else out


def build_fwm(params: CsfParams | None = None) -> FrequencyWeightingMatrix:
    """Build the base FWM H for ``params`` (defaults give the 8×8 HEVC basis)."""
    params = params or CsfParams()
    f = discrete_frequencies(params)
    fu, fv = np.meshgrid(f, f, indexing="ij")
    radial = radial_frequency_cpd(fu, fv, params.viewing_distance)
    # S(theta) == S(pi/2 - theta); ordering the arguments makes H bit-exactly symmetric
    lo, hi = np.minimum(fu, fv), np.maximum(fu, fv)
    normalised = radial / angular_symmetry(lo, hi, params.symmetry)
    return FrequencyWeightingMatrix(mtf(normalised, params), kind="base")
