"""Reconstruction quality (PSNR, SSIM) and Bjontegaard delta rate."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from aqm.simulate.images import ImagePlane

__all__ = [
    "RdPoint",
    "QualityReport",
    "psnr",
    "ssim",
    "gaussian_window",
    "bd_rate",
    "SSIM_WINDOW",
    "SSIM_SIGMA",
    "SSIM_K1",
    "SSIM_K2",
]

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
PEAK = 255.0


@dataclass(frozen=True)
class RdPoint:
    rate: int
    quality: float

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError(f"rate must be non-negative, got {self.rate}")


@dataclass(frozen=True)
class QualityReport:
    psnr: float
    ssim: float


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = a.samples if isinstance(a, ImagePlane) else np.asarray(a)
    b = b.samples if isinstance(b, ImagePlane) else np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a.astype(np.float64), b.astype(np.float64)


def psnr(a, b) -> float:
    """PSNR in dB for 8-bit planes; ``inf`` when the planes are identical."""
    a, b = _pair(a, b)
    mse = np.mean((a - b) ** 2)
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(PEAK**2 / mse)


def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    """Normalised 1D Gaussian taps; the 2D window is their outer product."""
    x = np.arange(size) - (size - 1) / 2.0
    taps = np.exp(-(x**2) / (2.0 * sigma**2))
    return taps / taps.sum()


def _filter_valid(img: np.ndarray, taps: np.ndarray) -> np.ndarray:
    n = len(taps)
    rows = sliding_window_view(img, n, axis=0) @ taps
    return sliding_window_view(rows, n, axis=1) @ taps


def ssim(a, b) -> float:
    """Mean SSIM over all fully contained 11×11 Gaussian windows (sigma 1.5)."""
    a, b = _pair(a, b)
    if min(a.shape) < SSIM_WINDOW:
        raise ValueError(f"image too small for SSIM: {a.shape}, window is {SSIM_WINDOW}")
    taps = gaussian_window()
    c1 = (SSIM_K1 * PEAK) ** 2
    c2 = (SSIM_K2 * PEAK) ** 2
    mu_a = _filter_valid(a, taps)
    mu_b = _filter_valid(b, taps)
    var_a = _filter_valid(a * a, taps) - mu_a**2
    var_b = _filter_valid(b * b, taps) - mu_b**2
    cov = _filter_valid(a * b, taps) - mu_a * mu_b
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a**2 + mu_b**2 + c1) * (var_a + var_b + c2)
    return float(np.mean(num / den))


def _curve(points) -> tuple[np.ndarray, np.ndarray]:
    points = sorted(points, key=lambda pt: pt.quality)
    if len(points) < 4:
        raise ValueError(f"BD-rate needs at least 4 RD points per curve, got {len(points)}")
    quality = np.array([pt.quality for pt in points], dtype=np.float64)
    rate = np.array([pt.rate for pt in points], dtype=np.float64)
    if not np.all(np.isfinite(quality)):
        raise ValueError("RD point quality must be finite")
    if np.any(np.diff(quality) == 0):
        raise ValueError("RD points must have distinct quality values")
    if np.any(rate <= 0):
        raise ValueError("BD-rate needs strictly positive rates")
    return quality, np.log(rate)


def bd_rate(anchor, test) -> float:
    """Average rate difference of ``test`` against ``anchor`` at equal quality, in percent.

    Log-rate is fitted as a cubic in quality for each curve and the fits are
    integrated over the shared quality interval. Negative means ``test`` needs
    less rate.
    """
    q_a, r_a = _curve(anchor)
    q_t, r_t = _curve(test)
    lo = max(q_a[0], q_t[0])
    hi = min(q_a[-1], q_t[-1])
    if not hi > lo:
        raise ValueError("RD curves do not overlap in quality")
    int_a = np.polyint(np.polyfit(q_a, r_a, 3))
    int_t = np.polyint(np.polyfit(q_t, r_t, 3))
    area_a = np.polyval(int_a, hi) - np.polyval(int_a, lo)
    area_t = np.polyval(int_t, hi) - np.polyval(int_t, lo)
    mean_diff = (area_t - area_a) / (hi - lo)
    return float(100.0 * (math.exp(mean_diff) - 1.0))
