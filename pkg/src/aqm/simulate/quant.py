"""QM-weighted scalar quantization with an HEVC-style QP to step mapping."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from aqm.qm import QM_SCALE, QuantizationMatrix, round_half_away

__all__ = ["QP_RANGE", "QuantConfig", "qstep", "step_matrix", "quantize", "dequantize", "flat_matrix"]

QP_RANGE = (0, 51)


def qstep(qp) -> float:
    """Base step size; doubles every 6 QP and equals 1.0 at QP 4."""
    return 2.0 ** ((qp - 4) / 6.0)


@dataclass(frozen=True)
class QuantConfig:
    qp: int
    qm: QuantizationMatrix

    def __post_init__(self):
        lo, hi = QP_RANGE
        if int(self.qp) != self.qp or not lo <= self.qp <= hi:
            raise ValueError(f"qp must be an integer in [{lo}, {hi}], got {self.qp!r}")

    @property
    def block_size(self) -> int:
        return self.qm.size


def flat_matrix(size: int = 8, kind: str = "intra") -> QuantizationMatrix:
    """All-16 matrix, i.e. scaling lists switched off."""
    return QuantizationMatrix(np.full((size, size), QM_SCALE), kind=kind, provenance="flat")


def step_matrix(config: QuantConfig) -> np.ndarray:
    return qstep(config.qp) * config.qm.values / QM_SCALE


def quantize(coeffs, config: QuantConfig) -> np.ndarray:
    """Integer levels for coefficients shaped (..., n, n)."""
    levels = round_half_away(np.asarray(coeffs, dtype=np.float64) / step_matrix(config))
    return np.asarray(levels).astype(np.int64)


def dequantize(levels, config: QuantConfig) -> np.ndarray:
    return np.asarray(levels, dtype=np.float64) * step_matrix(config)
