"""Part-drop masking and rasterization of landmark condition images.

Masks are sampled by a counter-based PRNG so the same (seed, draw index)
always yields the same mask; rasterization is byte-exact: edges first (parts
in sorted-name order), then radius-r discs in landmark-index order, with
round-half-up pixel centers and silent clipping at the canvas border.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from . import rng
from .errors import FormatError
from .landmarks import FacePartition, LandmarkFrame, LandmarkSequence

UNPARTITIONED_COLOR = (255, 255, 255)

# Fixed colors for the shipped partition; unknown part names get a stable
# hash-derived color so palettes never depend on insertion order.
DEFAULT_PALETTE: dict[str, tuple[int, int, int]] = {
    "eyebrows": (255, 96, 255),
    "eyes": (96, 255, 96),
    "pupils": (255, 255, 96),
    "nose": (96, 128, 255),
    "mouth": (255, 96, 96),
}


@dataclass(frozen=True)
class PartMask:
    """Keep/drop state per part; key set mirrors the partition exactly."""

    kept: Mapping[str, bool]

    def to_dict(self) -> dict[str, dict[str, bool]]:
        return {"kept": {name: bool(v) for name, v in self.kept.items()}}


@dataclass(frozen=True)
class RlsConfig:
    """Random part-drop configuration.

    ``drop_prob`` is either one probability for every part or a map from
    part name to probability (missing parts default to 0.5). ``per_clip``
    draws one mask per sequence; otherwise one per frame.
    """

    drop_prob: Union[float, Mapping[str, float]] = 0.5
    seed: int = 0
    per_clip: bool = True

    def __post_init__(self) -> None:
        probs = (
            self.drop_prob.values()
            if isinstance(self.drop_prob, Mapping)
            else [self.drop_prob]
        )
        for p in probs:
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"drop probability {p} outside [0, 1]")

    def prob_for(self, part: str) -> float:
        if isinstance(self.drop_prob, Mapping):
            return float(self.drop_prob.get(part, 0.5))
        return float(self.drop_prob)


@dataclass(frozen=True)
class RenderOptions:
    width: int = 512
    height: int = 512
    point_radius: int = 2
    draw_edges: bool = True
    palette: Mapping[str, tuple[int, int, int]] | None = None
    background: tuple[int, int, int] = (0, 0, 0)
    grayscale: bool = False

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError("canvas dimensions must be >= 1")
        if self.point_radius < 0:
            raise ValueError("point_radius must be >= 0")


def sample_mask(partition: FacePartition, cfg: RlsConfig, draw_index: int) -> PartMask:
    """Draw one keep/drop mask; pure function of (partition, cfg, draw_index)."""
    kept = {}
    for name in partition.parts:
        key = rng.derive_key(cfg.seed, "rls", name)
        kept[name] = not (rng.uniform(key, draw_index) < cfg.prob_for(name))
    return PartMask(kept=kept)


def plan_masks(
    partition: FacePartition, cfg: RlsConfig, n_frames: int, clip_index: int = 0
) -> list[PartMask]:
    """Masks for a sequence: one shared draw per clip, or one per frame."""
    if cfg.per_clip:
        mask = sample_mask(partition, cfg, clip_index)
        return [mask] * n_frames
    return [sample_mask(partition, cfg, t) for t in range(n_frames)]


def mouth_exclusion_mask(partition: FacePartition) -> PartMask:
    """Deterministic mask keeping everything except the mouth part."""
    if "mouth" not in partition.parts:
        raise FormatError("partition has no 'mouth' part")
    return PartMask(kept={name: name != "mouth" for name in partition.parts})


def _check_mask(partition: FacePartition, mask: PartMask) -> None:
    if set(mask.kept) != set(partition.parts):
        raise ValueError(
            f"mask parts {sorted(mask.kept)} do not match partition parts "
            f"{sorted(partition.parts)}"
        )


def visibility(partition: FacePartition, mask: PartMask) -> np.ndarray:
    """Per-landmark visibility flags; unpartitioned landmarks stay visible."""
    _check_mask(partition, mask)
    visible = np.ones(partition.topology_size, dtype=bool)
    for name, part in partition.parts.items():
        if not mask.kept[name]:
            visible[list(part.indices)] = False
    return visible


def apply_mask(seq: LandmarkSequence, partition: FacePartition, mask: PartMask) -> np.ndarray:
    """Visibility flags for a sequence's landmarks under a mask."""
    if seq.topology_size != partition.topology_size:
        raise FormatError(
            f"sequence topology {seq.topology_size} does not match partition "
            f"topology {partition.topology_size}"
        )
    return visibility(partition, mask)


def _hash_color(name: str) -> tuple[int, int, int]:
    digest = hashlib.blake2b(name.encode("utf-8"), digest_size=3).digest()
    # keep channels bright enough to stand out on the default background
    return tuple(64 + (b % 192) for b in digest)  # type: ignore[return-value]


def _luma(color: tuple[int, int, int]) -> tuple[int, int, int]:
    y = int(round(0.299 * color[0] + 0.587 * color[1] + 0.114 * color[2]))
    return (y, y, y)


def _resolve_color(name: str | None, opts: RenderOptions) -> tuple[int, int, int]:
    if name is None:
        color = UNPARTITIONED_COLOR
    elif opts.palette is not None and name in opts.palette:
        color = tuple(opts.palette[name])  # type: ignore[assignment]
    elif name in DEFAULT_PALETTE:
        color = DEFAULT_PALETTE[name]
    else:
        color = _hash_color(name)
    return _luma(color) if opts.grayscale else color


def _disc_offsets(radius: int) -> np.ndarray:
    span = np.arange(-radius, radius + 1)
    dx, dy = np.meshgrid(span, span)
    keep = dx * dx + dy * dy <= radius * radius
    return np.stack([dx[keep], dy[keep]], axis=1)


def _paint(img: np.ndarray, x: int, y: int, color: tuple[int, int, int]) -> None:
    if 0 <= x < img.shape[1] and 0 <= y < img.shape[0]:
        img[y, x] = color


def _draw_line(img: np.ndarray, x0: int, y0: int, x1: int, y1: int, color) -> None:
    # classic integer Bresenham; paints both endpoints
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    while True:
        _paint(img, x0, y0, color)
        if x0 == x1 and y0 == y1:
            return
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def rasterize_frame(
    frame: LandmarkFrame,
    partition: FacePartition,
    mask: PartMask,
    opts: RenderOptions = RenderOptions(),
) -> np.ndarray:
    """Render one landmark frame to an (H, W, 3) uint8 buffer."""
    if len(frame) != partition.topology_size:
        raise FormatError(
            f"frame has {len(frame)} points, partition expects {partition.topology_size}"
        )
    visible = visibility(partition, mask)
    img = np.empty((opts.height, opts.width, 3), dtype=np.uint8)
    img[:] = opts.background

    px = frame.points * np.array([float(opts.width), float(opts.height)])
    centers = np.floor(px + 0.5).astype(np.int64)  # round half up

    if opts.draw_edges:
        for name in sorted(partition.parts):
            part = partition.parts[name]
            color = _resolve_color(name, opts)
            for i, j in part.edges:
                if visible[i] and visible[j]:
                    _draw_line(img, centers[i, 0], centers[i, 1], centers[j, 0], centers[j, 1], color)

    offsets = _disc_offsets(opts.point_radius)
    owner = partition.index_to_part
    for i in range(partition.topology_size):
        if not visible[i]:
            continue
        color = _resolve_color(owner.get(i), opts)
        cx, cy = int(centers[i, 0]), int(centers[i, 1])
        for dx, dy in offsets:
            _paint(img, cx + int(dx), cy + int(dy), color)
    return img


MaskSpec = Union[PartMask, Sequence[PartMask], RlsConfig]


def rasterize_sequence(
    seq: LandmarkSequence,
    partition: FacePartition,
    masks: MaskSpec,
    opts: RenderOptions = RenderOptions(),
    clip_index: int = 0,
) -> tuple[list[np.ndarray], list[PartMask]]:
    """Render every frame; returns the buffers and the masks actually used."""
    if isinstance(masks, RlsConfig):
        mask_list = plan_masks(partition, masks, len(seq), clip_index=clip_index)
    elif isinstance(masks, PartMask):
        mask_list = [masks] * len(seq)
    else:
        mask_list = list(masks)
        if len(mask_list) != len(seq):
            raise ValueError(
                f"got {len(mask_list)} masks for {len(seq)} frames"
            )
    buffers = [
        rasterize_frame(frame, partition, mask, opts)
        for frame, mask in zip(seq.frames, mask_list)
    ]
    return buffers, mask_list


def write_png(path, buffer: np.ndarray) -> None:
    """Write an (H, W, 3) uint8 buffer as an 8-bit RGB PNG."""
    from PIL import Image

    Image.fromarray(buffer, mode="RGB").save(path, format="PNG")


def read_png(path) -> np.ndarray:
    """Read an image file into an (H, W, 3) uint8 buffer."""
    from PIL import Image

    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


RAW_IMAGE_MAGIC = b"MIMG"


def encode_raw_image(buffer: np.ndarray) -> bytes:
    """Self-describing raw RGB: magic, u32 width, u32 height, H*W*3 bytes."""
    arr = np.ascontiguousarray(buffer, dtype=np.uint8)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) buffer, got shape {arr.shape}")
    h, w = arr.shape[:2]
    header = RAW_IMAGE_MAGIC + w.to_bytes(4, "little") + h.to_bytes(4, "little")
    return header + arr.tobytes()


def decode_raw_image(data: bytes) -> np.ndarray:
    if data[:4] != RAW_IMAGE_MAGIC or len(data) < 12:
        raise FormatError("not a raw image document")
    w = int.from_bytes(data[4:8], "little")
    h = int.from_bytes(data[8:12], "little")
    payload = data[12:]
    if len(payload) != w * h * 3:
        raise FormatError(f"raw image payload has {len(payload)} bytes, expected {w * h * 3}")
    return np.frombuffer(payload, dtype=np.uint8).reshape(h, w, 3).copy()
