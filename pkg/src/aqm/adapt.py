"""Display-resolution adaptation of a frequency weighting matrix.

The adapted weights are ``H'[i, j] = H[i, j] ** A[i, j]`` where the exponent
``A = exp(-d / w)`` falls off with the normalised distance ``d`` of a
coefficient from DC, and ``w`` shrinks as the target display's diagonal grows
relative to the largest image a JPEG-era codec can describe (65535×65535).
Larger displays therefore pull high-frequency weights towards 1.0, which
yields finer quantization where artifacts would otherwise be visible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from aqm.csf import FrequencyWeightingMatrix

__all__ = [
    "MAX_DIMENSION",
    "DisplayGeometry",
    "ExponentField",
    "normalized_distance",
    "display_parameter",
    "exponent_field",
    "adapt_fwm",
    "parse_dimensions",
]

# largest image width/height representable in a baseline JPEG header
MAX_DIMENSION = 65535


@dataclass(frozen=True)
class DisplayGeometry:
    """Target display size and the quantities derived from it.

    Build instances with :func:`display_parameter`; the derived fields are
    recomputed and checked on construction.
    """

    width: int
    height: int
    max_width: int = MAX_DIMENSION
    max_height: int = MAX_DIMENSION
    h_a: float = field(init=False)
    h_t: float = field(init=False)
    p: float = field(init=False)
    w: float = field(init=False)

    def __post_init__(self):
        for name in ("width", "height", "max_width", "max_height"):
            value = getattr(self, name)
            if int(value) != value or value <= 0:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.width > self.max_width or self.height > self.max_height:
            raise ValueError(
                f"display {self.width}x{self.height} exceeds maxima "
                f"{self.max_width}x{self.max_height}"
            )
        h_a = math.hypot(self.width, self.height)
        h_t = math.hypot(self.max_width, self.max_height)
        p = h_a / h_t
        object.__setattr__(self, "h_a", h_a)
        object.__setattr__(self, "h_t", h_t)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "w", h_t ** (-p))

    @property
    def label(self) -> str:
        return f"{self.width}x{self.height}"


@dataclass(frozen=True)
class ExponentField:
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"exponent field must be square, got {values.shape}")
        if not (np.all(values >= 0) and np.all(values <= 1)):
            raise ValueError("exponents must lie in [0, 1]")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def size(self) -> int:
        return self.values.shape[0]


def normalized_distance(i, j, n: int):
    """Distance of (i, j) from DC, divided by the DC-to-(n-1, n-1) distance."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    i = np.asarray(i)
    j = np.asarray(j)
    if np.any((i < 0) | (i >= n) | (j < 0) | (j >= n)):
        raise ValueError(f"position out of range for a {n}x{n} block")
    far = 2.0 * (n - 1) ** 2
    out = np.sqrt((i.astype(np.float64) ** 2 + j.astype(np.float64) ** 2) / far)
    return out[()] if out.ndim == 0 else out


def display_parameter(
    width: int,
    height: int,
    max_width: int = MAX_DIMENSION,
    max_height: int = MAX_DIMENSION,
) -> DisplayGeometry:
    """Geometry of a ``width`` × ``height`` display, including ``p`` and ``w``."""
    return DisplayGeometry(width, height, max_width, max_height)


def exponent_field(geometry: DisplayGeometry, n: int = 8) -> ExponentField:
    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    d = normalized_distance(ii, jj, n)
    return ExponentField(np.exp(-d / geometry.w))


def adapt_fwm(base: FrequencyWeightingMatrix, field: ExponentField) -> FrequencyWeightingMatrix:
    """Raise each base weight to its exponent, giving the adapted FWM H'."""
    if base.kind != "base":
        raise ValueError("adapt_fwm expects a base FWM")
    if base.size != field.size:
        raise ValueError(f"size mismatch: FWM is {base.size}, exponent field is {field.size}")
    return FrequencyWeightingMatrix(base.values ** field.values, kind="adapted")


def parse_dimensions(text: str) -> tuple[int, int]:
    """Parse ``"WxH"`` (``x`` or ``X`` separator) into two positive ints."""
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ValueError(f"expected WIDTHxHEIGHT, got {text!r}")
    try:
        width, height = (int(part) for part in parts)
    except ValueError:
        raise ValueError(f"expected WIDTHxHEIGHT, got {text!r}") from None
    if width <= 0 or height <= 0:
        raise ValueError(f"dimensions must be positive, got {text!r}")
    return width, height
