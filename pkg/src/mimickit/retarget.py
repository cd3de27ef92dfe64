"""Full-face + per-part transform estimation and landmark retargeting.

A single least-squares similarity transform aligns the anchor driving frame
with the reference face; each facial part then gets a residual matrix (the
entrywise difference between its own fit and the full-face fit) that is
added back to the full-face matrix before application.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Literal, Mapping

import numpy as np

from .errors import FormatError, GeometryError
from .landmarks import (
    AffineTransform,
    FacePartition,
    LandmarkFrame,
    LandmarkSequence,
    to_pixel,
)

log = logging.getLogger(__name__)

# Residuals whose entries are all at or below this magnitude collapse to the
# exact zero matrix, so an already-aligned part adds literally nothing.
RESIDUAL_SNAP = 1e-9


@dataclass(frozen=True)
class RetargetOptions:
    anchor_index: int = 0
    mode: Literal["part_aware", "full_face_only"] = "part_aware"
    # parts with fewer distinct anchor points than this fall back to a
    # translation-only residual (similarity needs >= 2 distinct points)
    part_fit_threshold: int = 2


@dataclass(frozen=True)
class ResidualSet:
    """Full-face transform plus per-part residual matrices."""

    full: AffineTransform
    residuals: Mapping[str, AffineTransform]
    anchor_index: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "full": self.full.flat(),
            "residuals": {name: t.flat() for name, t in self.residuals.items()},
            "anchor_index": self.anchor_index,
        }


def estimate_similarity(src: np.ndarray, dst: np.ndarray) -> AffineTransform:
    """Least-squares similarity (uniform scale, rotation, translation).

    Closed-form solution minimizing sum ||dst_i - (s R src_i + t)||^2.
    """
    src = np.asarray(src, dtype=np.float64)
    dst = np.asarray(dst, dtype=np.float64)
    if src.ndim != 2 or src.shape[1] != 2 or dst.ndim != 2 or dst.shape[1] != 2:
        raise ValueError(f"point sets must have shape (n, 2), got {src.shape} and {dst.shape}")
    if src.shape[0] != dst.shape[0]:
        raise GeometryError(
            f"point count mismatch: {src.shape[0]} source vs {dst.shape[0]} destination"
        )
    n = src.shape[0]
    if n < 2:
        raise GeometryError("need at least 2 point pairs to fit a similarity")
    if np.unique(src, axis=0).shape[0] < 2:
        raise GeometryError("all source points coincident: scale undefined")

    mu_s = src.mean(axis=0)
    mu_d = dst.mean(axis=0)
    ds = src - mu_s
    dd = dst - mu_d
    var_s = float((ds * ds).sum()) / n
    cov = dd.T @ ds / n

    u, d, vt = np.linalg.svd(cov)
    sign = np.eye(2)
    if np.linalg.det(u) * np.linalg.det(vt) < 0:
        sign[1, 1] = -1.0
    rot = u @ sign @ vt
    scale = float((d * sign.diagonal()).sum()) / var_s
    if scale <= 0:
        raise GeometryError("degenerate geometry: fitted scale is not positive")
    t = mu_d - scale * rot @ mu_s
    return AffineTransform(np.hstack([scale * rot, t[:, None]]))


def apply_transform(transform: AffineTransform, frame: np.ndarray) -> np.ndarray:
    """Apply a 2x3 transform to an (n, 2) pixel frame.

    Evaluated per coordinate as a*x + b*y + t, so results are bit-identical
    to the scalar formula (no dot-product reassociation).
    """
    pts = np.asarray(frame, dtype=np.float64)
    m = transform.m
    x, y = pts[:, 0], pts[:, 1]
    return np.stack([m[0, 0] * x + m[0, 1] * y + m[0, 2],
                     m[1, 0] * x + m[1, 1] * y + m[1, 2]], axis=1)


def _snap(delta: np.ndarray) -> np.ndarray:
    if np.abs(delta).max(initial=0.0) <= RESIDUAL_SNAP:
        return np.zeros((2, 3))
    return delta


def estimate_residuals(
    anchor: np.ndarray,
    reference: np.ndarray,
    partition: FacePartition,
    full: AffineTransform,
    part_fit_threshold: int = 2,
    anchor_index: int = 0,
) -> ResidualSet:
    """Per-part residual matrices between part fits and the full-face fit.

    ``anchor`` and ``reference`` are pixel-space (n, 2) frames sharing the
    partition's topology. Parts too small for a similarity fit get a
    translation-only residual aligning part centroids.
    """
    anchor = np.asarray(anchor, dtype=np.float64)
    reference = np.asarray(reference, dtype=np.float64)
    threshold = max(2, part_fit_threshold)
    residuals: dict[str, AffineTransform] = {}
    for name, part in partition.parts.items():
        idx = list(part.indices)
        if not idx:
            log.warning("part %r has no landmarks; residual forced to zero", name)
            residuals[name] = AffineTransform.zero()
            continue
        a = anchor[idx]
        r = reference[idx]
        if np.unique(a, axis=0).shape[0] >= threshold:
            part_fit = estimate_similarity(a, r)
            delta = part_fit.m - full.m
        else:
            shift = r.mean(axis=0) - apply_transform(full, a.mean(axis=0)[None, :])[0]
            delta = np.array([[0.0, 0.0, shift[0]], [0.0, 0.0, shift[1]]])
        residuals[name] = AffineTransform(_snap(delta))
    return ResidualSet(full=full, residuals=residuals, anchor_index=anchor_index)


def retarget_sequence(
    driving: LandmarkSequence,
    reference: LandmarkFrame,
    reference_width: int,
    reference_height: int,
    partition: FacePartition,
    opts: RetargetOptions = RetargetOptions(),
) -> tuple[LandmarkSequence, ResidualSet]:
    """Retarget a driving sequence onto a reference face.

    Estimates the full-face similarity on the anchor frame, adds each part's
    residual matrix, and applies the per-landmark result to every driving
    frame. Returns the retargeted sequence (normalized to the reference
    dimensions, fps preserved) plus the transforms used.
    """
    if len(reference) != driving.topology_size:
        raise FormatError(
            f"reference topology {len(reference)} does not match driving "
            f"topology {driving.topology_size}"
        )
    if partition.topology_size != driving.topology_size:
        raise FormatError(
            f"partition topology {partition.topology_size} does not match driving "
            f"topology {driving.topology_size}"
        )
    if not 0 <= opts.anchor_index < len(driving):
        raise FormatError(
            f"anchor_index {opts.anchor_index} out of range for {len(driving)} frames"
        )

    anchor_px = to_pixel(driving.frames[opts.anchor_index], driving.source_width, driving.source_height)
    ref_px = to_pixel(reference, reference_width, reference_height)
    full = estimate_similarity(anchor_px, ref_px)
    if opts.mode == "part_aware":
        rset = estimate_residuals(
            anchor_px, ref_px, partition, full,
            part_fit_threshold=opts.part_fit_threshold,
            anchor_index=opts.anchor_index,
        )
    else:
        rset = ResidualSet(full=full, residuals={}, anchor_index=opts.anchor_index)

    # one matrix per landmark: full + residual of its part (zero elsewhere);
    # both modes run the same addition so all-zero residuals reproduce the
    # full-face output bit for bit
    deltas = np.zeros((driving.topology_size, 2, 3))
    for name, delta in rset.residuals.items():
        idx = list(partition.parts[name].indices)
        deltas[idx] = delta.m
    mats = full.m[None, :, :] + deltas

    scale = np.array([float(reference_width), float(reference_height)])
    driving_scale = np.array([float(driving.source_width), float(driving.source_height)])
    out_frames = []
    for frame in driving.frames:
        px = frame.points * driving_scale
        x, y = px[:, 0], px[:, 1]
        out_px = np.stack(
            [mats[:, 0, 0] * x + mats[:, 0, 1] * y + mats[:, 0, 2],
             mats[:, 1, 0] * x + mats[:, 1, 1] * y + mats[:, 1, 2]],
            axis=1,
        )
        out_frames.append(LandmarkFrame(out_px / scale, timestamp_ms=frame.timestamp_ms))
    result = LandmarkSequence(
        tuple(out_frames),
        fps=driving.fps,
        source_width=reference_width,
        source_height=reference_height,
        topology_size=driving.topology_size,
    )
    return result, rset
