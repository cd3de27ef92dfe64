"""Structural similarity and landmark-space diagnostics.

SSIM uses a Gaussian-weighted sliding window at stride 1 over the valid
region only (no padding); color inputs are reduced to luma first. Windowed
means/covariances use the population convention (weights sum to 1).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import ndimage

from .landmarks import LandmarkSequence


@dataclass(frozen=True)
class SsimParams:
    window: int = 11
    sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 1.0

    def __post_init__(self) -> None:
        if self.window < 3 or self.window % 2 == 0:
            raise ValueError(f"window must be odd and >= 3, got {self.window}")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.k1 <= 0 or self.k2 <= 0:
            raise ValueError("k1 and k2 must be positive")


def gaussian_window(window: int, sigma: float) -> np.ndarray:
    """1-D Gaussian taps normalized to sum to 1."""
    offsets = np.arange(window, dtype=np.float64) - (window - 1) / 2.0
    g = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    return g / g.sum()


def to_gray(img: np.ndarray) -> np.ndarray:
    """Reduce an image to a 2-D luma plane (0.299R + 0.587G + 0.114B)."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        return arr
    if arr.ndim == 3 and arr.shape[2] == 3:
        return arr[:, :, 0] * 0.299 + arr[:, :, 1] * 0.587 + arr[:, :, 2] * 0.114
    raise ValueError(f"expected HxW or HxWx3 image, got shape {arr.shape}")


def _windowed(values: np.ndarray, taps: np.ndarray, pad: int) -> np.ndarray:
    # separable correlation; interior of the constant-padded result equals
    # the exact valid-region windowed sum
    out = ndimage.correlate1d(values, taps, axis=0, mode="constant")
    out = ndimage.correlate1d(out, taps, axis=1, mode="constant")
    return out[pad:-pad, pad:-pad]


def ssim(img_a: np.ndarray, img_b: np.ndarray, params: SsimParams = SsimParams()) -> float:
    """Mean local SSIM between two same-shape images; result in [-1, 1]."""
    a = to_gray(img_a)
    b = to_gray(img_b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if min(a.shape) < params.window:
        raise ValueError(
            f"image {a.shape} smaller than {params.window}x{params.window} window"
        )
    taps = gaussian_window(params.window, params.sigma)
    pad = params.window // 2
    c1 = (params.k1 * params.dynamic_range) ** 2
    c2 = (params.k2 * params.dynamic_range) ** 2

    mu_a = _windowed(a, taps, pad)
    mu_b = _windowed(b, taps, pad)
    var_a = _windowed(a * a, taps, pad) - mu_a * mu_a
    var_b = _windowed(b * b, taps, pad) - mu_b * mu_b
    cov = _windowed(a * b, taps, pad) - mu_a * mu_b

    num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return float(np.mean(num / den))


def mean_ssim_sequence(
    frames_a: Sequence[np.ndarray],
    frames_b: Sequence[np.ndarray],
    params: SsimParams = SsimParams(),
) -> float:
    """Arithmetic mean of per-frame SSIM over two equal-length frame lists."""
    if len(frames_a) != len(frames_b):
        raise ValueError(f"frame count mismatch: {len(frames_a)} vs {len(frames_b)}")
    if not frames_a:
        raise ValueError("need at least one frame pair")
    scores = [ssim(a, b, params) for a, b in zip(frames_a, frames_b)]
    return float(sum(scores) / len(scores))


def ssim_report(
    frames_a: Sequence[np.ndarray],
    frames_b: Sequence[np.ndarray],
    params: SsimParams = SsimParams(),
) -> dict:
    """Per-frame scores plus their mean, in report-file shape."""
    if len(frames_a) != len(frames_b):
        raise ValueError(f"frame count mismatch: {len(frames_a)} vs {len(frames_b)}")
    if not frames_a:
        raise ValueError("need at least one frame pair")
    per_frame = [ssim(a, b, params) for a, b in zip(frames_a, frames_b)]
    return {"per_frame": per_frame, "mean": float(sum(per_frame) / len(per_frame))}


def landmark_rmse(
    seq_a: LandmarkSequence, seq_b: LandmarkSequence, space: str = "normalized"
) -> float:
    """Root mean squared point distance over all (frame, landmark) pairs."""
    if space not in ("normalized", "pixel"):
        raise ValueError(f"space must be 'normalized' or 'pixel', got {space!r}")
    if len(seq_a) != len(seq_b):
        raise ValueError(f"frame count mismatch: {len(seq_a)} vs {len(seq_b)}")
    if seq_a.topology_size != seq_b.topology_size:
        raise ValueError(
            f"topology mismatch: {seq_a.topology_size} vs {seq_b.topology_size}"
        )
    a = seq_a.as_array()
    b = seq_b.as_array()
    if space == "pixel":
        a = a * np.array([seq_a.source_width, seq_a.source_height], dtype=np.float64)
        b = b * np.array([seq_b.source_width, seq_b.source_height], dtype=np.float64)
    sq = ((a - b) ** 2).sum(axis=2)
    return float(np.sqrt(sq.mean()))
