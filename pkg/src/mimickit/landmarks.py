"""Landmark data model, partition validation, and file formats.

Coordinates are stored normalized (fractions of the source frame) together
with the source pixel dimensions; geometry code converts to pixel space via
:func:`to_pixel`. See docs/formats.md for the byte-level file schemas.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import FormatError

CANONICAL_FORMAT = "mimic-landmarks"
SCHEMA_VERSION = "1"

# Landmarks may legitimately leave the frame (profile poses); outside this
# band they are still accepted but tallied as warnings on parse.
COORD_WARN_LO = -0.5
COORD_WARN_HI = 1.5

Point2 = tuple[float, float]


def _frozen_f64(values: Any, shape_hint: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"{shape_hint} must have shape (n, 2), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{shape_hint} contains non-finite coordinates")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class LandmarkFrame:
    """One frame of 2D landmarks in normalized coordinates."""

    points: np.ndarray  # (n, 2) float64, read-only
    timestamp_ms: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", _frozen_f64(self.points, "points"))

    def __len__(self) -> int:
        return self.points.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LandmarkFrame):
            return NotImplemented
        return (
            self.timestamp_ms == other.timestamp_ms
            and self.points.shape == other.points.shape
            and bool(np.array_equal(self.points, other.points))
        )

    def point(self, i: int) -> Point2:
        return (float(self.points[i, 0]), float(self.points[i, 1]))


@dataclass(frozen=True, eq=False)
class LandmarkSequence:
    """A landmark stream plus the metadata needed to recover pixel space."""

    frames: tuple[LandmarkFrame, ...]
    fps: float
    source_width: int
    source_height: int
    topology_size: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "frames", tuple(self.frames))
        if not self.frames:
            raise ValueError("no frames")
        if not (math.isfinite(self.fps) and self.fps > 0):
            raise ValueError(f"fps must be positive, got {self.fps}")
        if self.source_width < 1 or self.source_height < 1:
            raise ValueError("source dimensions must be >= 1 px")
        if self.topology_size < 1:
            raise ValueError("topology_size must be >= 1")
        for i, frame in enumerate(self.frames):
            if len(frame) != self.topology_size:
                raise ValueError(
                    f"frame {i + 1}: expected {self.topology_size} points, got {len(frame)}"
                )

    def __len__(self) -> int:
        return len(self.frames)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LandmarkSequence):
            return NotImplemented
        return (
            self.fps == other.fps
            and self.source_width == other.source_width
            and self.source_height == other.source_height
            and self.topology_size == other.topology_size
            and len(self.frames) == len(other.frames)
            and all(a == b for a, b in zip(self.frames, other.frames))
        )

    def as_array(self) -> np.ndarray:
        """Stack all frames into an (n_frames, topology_size, 2) array."""
        return np.stack([f.points for f in self.frames])

    @classmethod
    def from_array(
        cls,
        coords: np.ndarray,
        fps: float,
        source_width: int,
        source_height: int,
        timestamps_ms: Sequence[int | None] | None = None,
    ) -> "LandmarkSequence":
        coords = np.asarray(coords, dtype=np.float64)
        if coords.ndim != 3 or coords.shape[2] != 2:
            raise ValueError(f"expected shape (n_frames, topology_size, 2), got {coords.shape}")
        if timestamps_ms is None:
            stamps: Sequence[int | None] = [None] * coords.shape[0]
        else:
            if len(timestamps_ms) != coords.shape[0]:
                raise ValueError("timestamps_ms length must match frame count")
            stamps = timestamps_ms
        frames = tuple(
            LandmarkFrame(coords[i], timestamp_ms=stamps[i]) for i in range(coords.shape[0])
        )
        return cls(frames, float(fps), source_width, source_height, coords.shape[1])


@dataclass(frozen=True, eq=False)
class AffineTransform:
    """Planar transform [[a, b, tx], [c, d, ty]] applied as p' = A @ p + t."""

    m: np.ndarray  # (2, 3) float64, read-only

    def __post_init__(self) -> None:
        arr = np.asarray(self.m, dtype=np.float64)
        if arr.shape != (2, 3):
            raise ValueError(f"transform matrix must be 2x3, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("transform matrix contains non-finite entries")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "m", arr)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AffineTransform):
            return NotImplemented
        return bool(np.array_equal(self.m, other.m))

    @classmethod
    def identity(cls) -> "AffineTransform":
        return cls(np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]))

    @classmethod
    def zero(cls) -> "AffineTransform":
        return cls(np.zeros((2, 3)))

    def flat(self) -> list[float]:
        """Row-major six-entry listing [a, b, tx, c, d, ty]."""
        return [float(v) for v in self.m.ravel()]


@dataclass(frozen=True)
class FacePart:
    """Index set of one facial part plus its drawing connectivity."""

    indices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class FacePartition:
    """Named disjoint landmark index sets over a fixed topology."""

    parts: Mapping[str, FacePart]
    topology_size: int

    @cached_property
    def index_to_part(self) -> dict[int, str]:
        owner: dict[int, str] = {}
        for name, part in self.parts.items():
            for i in part.indices:
                owner[i] = name
        return owner

    def part_names(self) -> tuple[str, ...]:
        return tuple(self.parts)

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "FacePartition":
        """Build from the partition file schema; raises on invalid data."""
        try:
            topology_size = int(doc["topology_size"])
            raw_parts = doc["parts"]
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"partition document missing/invalid field: {exc}") from exc
        if not isinstance(raw_parts, Mapping):
            raise FormatError("partition 'parts' must be an object")
        parts: dict[str, FacePart] = {}
        for name, spec_part in raw_parts.items():
            try:
                indices = tuple(sorted(int(i) for i in spec_part["indices"]))
                edges = tuple(
                    (int(i), int(j)) for i, j in spec_part.get("edges", [])
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise FormatError(f"partition part '{name}' malformed: {exc}") from exc
            parts[name] = FacePart(indices=indices, edges=edges)
        partition = cls(parts=parts, topology_size=topology_size)
        findings = validate_partition(partition, topology_size)
        if findings:
            raise FormatError("invalid partition: " + "; ".join(findings))
        return partition

    def to_dict(self) -> dict[str, Any]:
        return {
            "topology_size": self.topology_size,
            "parts": {
                name: {
                    "indices": list(part.indices),
                    "edges": [list(e) for e in part.edges],
                }
                for name, part in self.parts.items()
            },
        }


def validate_partition(partition: FacePartition, topology_size: int) -> list[str]:
    """Check all partition invariants; returns findings (empty == valid)."""
    findings: list[str] = []
    seen: dict[int, str] = {}
    for name, part in partition.parts.items():
        if not name:
            findings.append("empty part name")
        if list(part.indices) != sorted(set(part.indices)):
            findings.append(f"part '{name}': indices not sorted unique")
        members = set(part.indices)
        for i in part.indices:
            if not (0 <= i < topology_size):
                findings.append(f"part '{name}': index {i} outside [0, {topology_size})")
            elif i in seen and seen[i] != name:
                findings.append(f"overlap: index {i} in '{seen[i]}' and '{name}'")
            else:
                seen[i] = name
        for i, j in part.edges:
            for endpoint in (i, j):
                if endpoint not in members:
                    findings.append(
                        f"part '{name}': edge ({i},{j}) endpoint {endpoint} outside part"
                    )
    return findings


def to_pixel(frame: LandmarkFrame, width: int, height: int) -> np.ndarray:
    """Scale normalized coordinates into pixel space (px = x*w, py = y*h)."""
    if width < 1 or height < 1:
        raise ValueError("width and height must be >= 1")
    return frame.points * np.array([float(width), float(height)])


@dataclass(frozen=True)
class ParseReport:
    """Parse result plus a tally of out-of-frame coordinates."""

    sequence: LandmarkSequence
    out_of_range_count: int


def _loads(data: bytes | str) -> Any:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError(f"document is not valid UTF-8: {exc}") from exc
    try:
        # NaN/Infinity literals survive here; per-coordinate checks locate them
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed document: {exc}") from exc


def _require_number(value: Any, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FormatError(f"{what} must be a number, got {value!r}")
    return float(value)


def _require_int(value: Any, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"{what} must be an integer, got {value!r}")
    return value


def _parse_frames(
    raw_frames: Any,
    topology_size: int,
    max_coords: int,
    timestamps: Sequence[int | None] | None,
) -> tuple[list[LandmarkFrame], int]:
    if not isinstance(raw_frames, list):
        raise FormatError("'frames' must be an array")
    if not raw_frames:
        raise FormatError("no frames")
    frames: list[LandmarkFrame] = []
    warn_count = 0
    for fi, raw_frame in enumerate(raw_frames, start=1):
        if not isinstance(raw_frame, list):
            raise FormatError(f"frame {fi}: expected an array of points")
        if len(raw_frame) != topology_size:
            raise FormatError(
                f"frame {fi}: expected {topology_size} points, got {len(raw_frame)}"
            )
        coords = np.empty((topology_size, 2))
        for pi, raw_point in enumerate(raw_frame):
            if not isinstance(raw_point, list) or not 2 <= len(raw_point) <= max_coords:
                raise FormatError(
                    f"frame {fi} point {pi}: expected [x, y]"
                    + ("[, z]" if max_coords > 2 else "")
                )
            for axis, label in ((0, "x"), (1, "y")):
                v = _require_number(raw_point[axis], f"frame {fi} point {pi} {label}")
                if not math.isfinite(v):
                    raise FormatError(f"frame {fi} point {pi}: non-finite {label}")
                coords[pi, axis] = v
                if not COORD_WARN_LO <= v <= COORD_WARN_HI:
                    warn_count += 1
        stamp = timestamps[fi - 1] if timestamps is not None else None
        frames.append(LandmarkFrame(coords, timestamp_ms=stamp))
    return frames, warn_count


def _parse_header(doc: Any) -> tuple[float, int, int, int]:
    if not isinstance(doc, dict):
        raise FormatError("top-level value must be an object")
    for key in ("version", "fps", "width", "height", "topology_size", "frames"):
        if key not in doc:
            raise FormatError(f"missing required field '{key}'")
    if doc["version"] != SCHEMA_VERSION:
        raise FormatError(f"unsupported schema version {doc['version']!r}")
    fps = _require_number(doc["fps"], "fps")
    if not (math.isfinite(fps) and fps > 0):
        raise FormatError(f"fps must be positive, got {fps}")
    width = _require_int(doc["width"], "width")
    height = _require_int(doc["height"], "height")
    if width < 1 or height < 1:
        raise FormatError("width and height must be positive")
    topology_size = _require_int(doc["topology_size"], "topology_size")
    if topology_size < 1:
        raise FormatError("topology_size must be positive")
    return fps, width, height, topology_size


def parse_mediapipe_export(data: bytes | str) -> ParseReport:
    """Parse a landmark export document (see docs/formats.md).

    Z coordinates, when present, are dropped; coordinates outside
    [-0.5, 1.5] are accepted but counted in the returned tally.
    """
    doc = _loads(data)
    fps, width, height, topology_size = _parse_header(doc)
    frames, warn_count = _parse_frames(doc["frames"], topology_size, max_coords=3, timestamps=None)
    seq = LandmarkSequence(tuple(frames), fps, width, height, topology_size)
    return ParseReport(sequence=seq, out_of_range_count=warn_count)


def read_canonical(data: bytes | str) -> LandmarkSequence:
    """Read a canonical landmark document (strict schema, exact values)."""
    doc = _loads(data)
    if not isinstance(doc, dict):
        raise FormatError("top-level value must be an object")
    if doc.get("format") != CANONICAL_FORMAT:
        raise FormatError(f"not a {CANONICAL_FORMAT} document")
    fps, width, height, topology_size = _parse_header(doc)
    timestamps: Sequence[int | None] | None = None
    if "timestamps_ms" in doc:
        raw = doc["timestamps_ms"]
        if not isinstance(raw, list) or len(raw) != len(doc["frames"]):
            raise FormatError("'timestamps_ms' must be an array matching frame count")
        timestamps = [None if v is None else _require_int(v, "timestamp") for v in raw]
    frames, _ = _parse_frames(doc["frames"], topology_size, max_coords=2, timestamps=timestamps)
    return LandmarkSequence(tuple(frames), fps, width, height, topology_size)


def write_canonical(seq: LandmarkSequence) -> bytes:
    """Serialize to the canonical byte-exact document.

    Floats are written with shortest round-trip repr, keys in fixed order,
    compact separators, one trailing newline; read_canonical() recovers the
    sequence exactly.
    """
    doc: dict[str, Any] = {
        "format": CANONICAL_FORMAT,
        "version": SCHEMA_VERSION,
        "fps": float(seq.fps),
        "width": seq.source_width,
        "height": seq.source_height,
        "topology_size": seq.topology_size,
        "frames": [
            [[float(x), float(y)] for x, y in frame.points] for frame in seq.frames
        ],
    }
    if any(f.timestamp_ms is not None for f in seq.frames):
        doc["timestamps_ms"] = [f.timestamp_ms for f in seq.frames]
    return (json.dumps(doc, separators=(",", ":"), allow_nan=False) + "\n").encode("utf-8")


def load_partition(data: bytes | str) -> FacePartition:
    """Parse a partition file (see docs/formats.md)."""
    doc = _loads(data)
    if not isinstance(doc, dict):
        raise FormatError("partition document must be an object")
    return FacePartition.from_dict(doc)


def default_partition() -> FacePartition:
    """The shipped 478-point face-mesh partition (brows/eyes/pupils/nose/mouth)."""
    payload = resources.files("mimickit.data").joinpath("face_partition_478.json").read_bytes()
    return load_partition(payload)
