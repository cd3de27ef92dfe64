"""Loss-composition utilities: timestep weighting and objective assembly.

The perceptual term is a plain scalar supplied by the caller; nothing here
depends on a learned model.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def timestep_weight(t: int, total_steps: int) -> float:
    """Cosine falloff cos(t*pi/(2T)): 1 at t=0, 0 at t=T, non-increasing."""
    if total_steps <= 0:
        raise ValueError(f"total_steps must be positive, got {total_steps}")
    if not 0 <= t <= total_steps:
        raise ValueError(f"t must be in [0, {total_steps}], got {t}")
    return math.cos(t * math.pi / (2.0 * total_steps))


def pixel_mse(img_a: np.ndarray, img_b: np.ndarray) -> float:
    """Mean squared difference over all pixels and channels."""
    a = np.asarray(img_a, dtype=np.float64)
    b = np.asarray(img_b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    return float(np.mean(diff * diff))


def spatial_loss(t: int, total_steps: int, mse: float, perceptual: float) -> float:
    """Timestep-weighted pixel-space loss: w(t) * (mse + perceptual)."""
    if mse < 0 or perceptual < 0:
        raise ValueError("loss components must be non-negative")
    return timestep_weight(t, total_steps) * (mse + perceptual)


def total_objective(l_latent: float, l_spatial: float, spatial_weight: float) -> float:
    """Combined objective: latent loss plus weighted spatial loss."""
    for name, v in (("l_latent", l_latent), ("l_spatial", l_spatial), ("spatial_weight", spatial_weight)):
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v}")
    return l_latent + spatial_weight * l_spatial


@dataclass(frozen=True)
class LossBreakdown:
    """All inputs of one objective evaluation, for logging/audit."""

    l_latent: float
    mse: float
    perceptual: float
    t: int
    total_steps: int
    spatial_weight: float = 1.0

    def __post_init__(self) -> None:
        if not 0 <= self.t <= self.total_steps:
            raise ValueError(f"t must be in [0, {self.total_steps}], got {self.t}")
        for name in ("l_latent", "mse", "perceptual", "spatial_weight"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and non-negative, got {v}")

    def spatial(self) -> float:
        return spatial_loss(self.t, self.total_steps, self.mse, self.perceptual)

    def total(self) -> float:
        return total_objective(self.l_latent, self.spatial(), self.spatial_weight)


def weight_schedule(total_steps: int) -> np.ndarray:
    """All weights w(0..T) as a (T+1,) array."""
    if total_steps <= 0:
        raise ValueError(f"total_steps must be positive, got {total_steps}")
    return np.array([timestep_weight(t, total_steps) for t in range(total_steps + 1)])
