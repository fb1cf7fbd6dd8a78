"""Integer quantization matrices derived from frequency weighting matrices.

An intra matrix is ``round(16 / H)``; the inter matrix follows from the intra
one through an affine model; 16×16 and 32×32 matrices are nearest-neighbour
replications of the 8×8 ones, as in HEVC where only 8×8 defaults exist.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from aqm.adapt import DisplayGeometry, adapt_fwm, exponent_field
from aqm.csf import CsfParams, FrequencyWeightingMatrix, build_fwm

__all__ = [
    "QM_SCALE",
    "SIZES",
    "QuantizationMatrix",
    "InterModelParams",
    "IDENTITY_MODEL",
    "round_half_away",
    "derive_qm",
    "derive_inter",
    "replicate",
    "diagonal_scan",
    "from_diagonal_scan",
    "hevc_default_matrix",
    "fit_inter_model",
    "hevc_fitted_model",
    "default_matrices",
    "adaptive_matrices",
]

QM_SCALE = 16
SIZES = (4, 8, 16, 32)
KINDS = ("intra", "inter")

# HEVC default 8x8 scaling lists (Table 7-6 of the HEVC text), up-right diagonal order.
_HEVC_INTRA_8X8 = (
    16, 16, 16, 16, 16, 16, 16, 16, 16, 16, 17, 16, 17, 16, 17, 18,
    17, 18, 18, 17, 18, 21, 19, 20, 21, 20, 19, 21, 24, 22, 22, 24,
    24, 22, 22, 24, 25, 25, 27, 30, 27, 25, 25, 29, 31, 35, 35, 31,
    29, 36, 41, 44, 41, 36, 47, 54, 54, 47, 65, 70, 65, 88, 88, 115,
)  # fmt: skip
_HEVC_INTER_8X8 = (
    16, 16, 16, 16, 16, 16, 16, 16, 16, 16, 17, 17, 17, 17, 17, 18,
    18, 18, 18, 18, 18, 20, 20, 20, 20, 20, 20, 20, 24, 24, 24, 24,
    24, 24, 24, 24, 25, 25, 25, 25, 25, 25, 25, 28, 28, 28, 28, 28,
    28, 33, 33, 33, 33, 33, 41, 41, 41, 41, 54, 54, 54, 71, 71, 91,
)  # fmt: skip


def round_half_away(x):
    """Round to the nearest integer, ties away from zero (numpy rounds ties to even)."""
    x = np.asarray(x, dtype=np.float64)
    out = np.sign(x) * np.floor(np.abs(x) + 0.5)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class QuantizationMatrix:
    """A square integer weighting matrix for one transform size and kind.

    ``provenance`` is ``"default"``, ``"adaptive"`` or ``"user"``; adaptive
    matrices carry the :class:`DisplayGeometry` they were built for. ``dc`` is
    the separately signalled DC weight used by 16×16 and 32×32 scaling lists
    and defaults to the (0, 0) entry.
    """

    values: np.ndarray = field(repr=False)
    kind: str = "intra"
    provenance: str = "default"
    geometry: DisplayGeometry | None = None
    dc: int | None = None

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"quantization matrix must be square, got {values.shape}")
        if values.shape[0] not in SIZES:
            raise ValueError(f"unsupported matrix size {values.shape[0]}; expected one of {SIZES}")
        if not np.all(np.equal(np.mod(values, 1), 0)):
            raise ValueError("quantization matrix entries must be integers")
        values = values.astype(np.int64)
        if np.any(values < 1):
            raise ValueError("quantization matrix entries must be >= 1")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be 'intra' or 'inter', got {self.kind!r}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        dc = int(values[0, 0]) if self.dc is None else int(self.dc)
        if dc < 1:
            raise ValueError("DC weight must be >= 1")
        object.__setattr__(self, "dc", dc)

    @property
    def size(self) -> int:
        return self.values.shape[0]

    @property
    def key(self) -> tuple[int, str]:
        return self.size, self.kind

    def __getitem__(self, index):
        return self.values[index]

    def __eq__(self, other):
        if not isinstance(other, QuantizationMatrix):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.dc == other.dc
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


@dataclass(frozen=True)
class InterModelParams:
    """Entrywise affine map ``inter = round(slope * intra + intercept)``."""

    slope: float = 1.0
    intercept: float = 0.0


IDENTITY_MODEL = InterModelParams()


def derive_qm(fwm: FrequencyWeightingMatrix, scale: int = QM_SCALE) -> QuantizationMatrix:
    """Intra matrix ``round(scale / H)`` for a base or adapted FWM."""
    if int(scale) != scale or scale < 1:
        raise ValueError(f"scale must be a positive integer, got {scale}")
    values = round_half_away(scale / fwm.values).astype(np.int64)
    provenance = "adaptive" if fwm.kind == "adapted" else "default"
    return QuantizationMatrix(values, kind="intra", provenance=provenance)


def derive_inter(intra: QuantizationMatrix, params: InterModelParams = IDENTITY_MODEL) -> QuantizationMatrix:
    if intra.kind != "intra":
        raise ValueError("derive_inter expects an intra matrix")
    values = round_half_away(params.slope * intra.values + params.intercept)
    if np.any(values < 1):
        raise ValueError(
            f"inter model slope={params.slope}, intercept={params.intercept} "
            "produces entries below 1"
        )
    dc = int(round_half_away(params.slope * intra.dc + params.intercept))
    return QuantizationMatrix(
        values.astype(np.int64),
        kind="inter",
        provenance=intra.provenance,
        geometry=intra.geometry,
        dc=max(dc, 1),
    )


def replicate(qm8: QuantizationMatrix, target_size: int) -> QuantizationMatrix:
    """Upsample an 8×8 matrix to 16×16 or 32×32 by repeating each entry."""
    if qm8.size != 8:
        raise ValueError(f"replicate expects an 8x8 matrix, got {qm8.size}x{qm8.size}")
    if target_size not in (16, 32):
        raise ValueError(f"unsupported replication target {target_size}; expected 16 or 32")
    k = target_size // 8
    values = np.repeat(np.repeat(qm8.values, k, axis=0), k, axis=1)
    return QuantizationMatrix(
        values, kind=qm8.kind, provenance=qm8.provenance, geometry=qm8.geometry, dc=qm8.dc
    )


def diagonal_scan(n: int) -> list[tuple[int, int]]:
    """Up-right diagonal scan positions ``(row, col)`` for an n×n block.

    Each anti-diagonal is walked from its bottom-left end to its top-right
    end, which is the order HEVC uses to transmit scaling-list coefficients.
    """
    order = []
    for diag in range(2 * n - 1):
        row = min(diag, n - 1)
        col = diag - row
        while row >= 0 and col < n:
            order.append((row, col))
            row -= 1
            col += 1
    return order


def from_diagonal_scan(coefficients, n: int) -> np.ndarray:
    coefficients = list(coefficients)
    if len(coefficients) != n * n:
        raise ValueError(f"expected {n * n} coefficients, got {len(coefficients)}")
    out = np.zeros((n, n), dtype=np.int64)
    for value, (row, col) in zip(coefficients, diagonal_scan(n)):
        out[row, col] = value
    return out


def hevc_default_matrix(kind: str) -> np.ndarray:
    """The HEVC standard's default 8×8 intra or inter matrix in raster layout."""
    table = {"intra": _HEVC_INTRA_8X8, "inter": _HEVC_INTER_8X8}[kind]
    return from_diagonal_scan(table, 8)


def fit_inter_model(intra, inter) -> InterModelParams:
    """Least-squares slope and intercept mapping ``intra`` onto ``inter``."""
    x = np.asarray(intra, dtype=np.float64).ravel()
    y = np.asarray(inter, dtype=np.float64).ravel()
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    return InterModelParams(float(slope), float(intercept))


def hevc_fitted_model() -> InterModelParams:
    """Affine model fitted from the HEVC default intra matrix to its inter matrix."""
    return fit_inter_model(hevc_default_matrix("intra"), hevc_default_matrix("inter"))


def _matrix_set(intra8: QuantizationMatrix, inter_model: InterModelParams, sizes) -> dict:
    inter8 = derive_inter(intra8, inter_model)
    out = {}
    for size in sizes:
        if size == 8:
            out[(8, "intra")], out[(8, "inter")] = intra8, inter8
        elif size in (16, 32):
            out[(size, "intra")] = replicate(intra8, size)
            out[(size, "inter")] = replicate(inter8, size)
        else:
            raise ValueError(f"size {size} is not derivable from the 8x8 FWM")
    return out


def default_matrices(
    params: CsfParams | None = None,
    inter_model: InterModelParams = IDENTITY_MODEL,
    sizes=(8, 16, 32),
) -> dict[tuple[int, str], QuantizationMatrix]:
    """Default intra and inter matrices keyed by ``(size, kind)``."""
    params = params or CsfParams()
    if params.n != 8:
        raise ValueError("the quantization matrix path is defined for n = 8 only")
    return _matrix_set(derive_qm(build_fwm(params)), inter_model, sizes)


def adaptive_matrices(
    geometry: DisplayGeometry,
    params: CsfParams | None = None,
    inter_model: InterModelParams = IDENTITY_MODEL,
    sizes=(8, 16, 32),
) -> dict[tuple[int, str], QuantizationMatrix]:
    """Display-adapted intra and inter matrices keyed by ``(size, kind)``."""
    params = params or CsfParams()
    if params.n != 8:
        raise ValueError("the quantization matrix path is defined for n = 8 only")
    adapted = adapt_fwm(build_fwm(params), exponent_field(geometry, 8))
    intra8 = derive_qm(adapted)
    intra8 = QuantizationMatrix(intra8.values, kind="intra", provenance="adaptive", geometry=geometry)
    return _matrix_set(intra8, inter_model, sizes)
