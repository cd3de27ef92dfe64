from __future__ import annotations

import io
import wave

import numpy as np
import pytest

from mimickit import (
    FacePart,
    FacePartition,
    LandmarkFrame,
    LandmarkSequence,
    default_partition,
)


@pytest.fixture(scope="session")
def face_partition() -> FacePartition:
    return default_partition()


@pytest.fixture(scope="session")
def mini_partition() -> FacePartition:
    """Small synthetic face: parts are spatially well separated."""
    return FacePartition(
        parts={
            "eyes": FacePart(indices=(0, 1, 2, 3), edges=((0, 1), (2, 3))),
            "nose": FacePart(indices=(4, 5, 6), edges=((4, 5), (4, 6), (5, 6))),
            "mouth": FacePart(indices=(7, 8, 9, 10), edges=((7, 8), (8, 9), (9, 10), (10, 7))),
            "pupil": FacePart(indices=(11,)),
        },
        topology_size=14,
    )


def mini_face_points() -> np.ndarray:
    """Normalized layout matching mini_partition; indices 12-13 unpartitioned."""
    return np.array(
        [
            [0.30, 0.35], [0.34, 0.35],        # left eye
            [0.62, 0.35], [0.66, 0.35],        # right eye
            [0.48, 0.50], [0.44, 0.55], [0.52, 0.55],  # nose
            [0.40, 0.72], [0.56, 0.72], [0.56, 0.80], [0.40, 0.80],  # mouth
            [0.32, 0.33],                       # pupil
            [0.48, 0.92], [0.48, 0.10],         # chin, forehead (no part)
        ]
    )


@pytest.fixture
def mini_frame() -> LandmarkFrame:
    return LandmarkFrame(mini_face_points())


def make_mini_sequence(n_frames: int = 3, fps: float = 25.0, jitter: float = 0.01,
                       seed: int = 0, width: int = 512, height: int = 512) -> LandmarkSequence:
    base = mini_face_points()
    gen = np.random.default_rng(seed)
    frames = []
    for t in range(n_frames):
        drift = np.array([0.002 * t, -0.001 * t])
        noise = gen.uniform(-jitter, jitter, size=base.shape)
        frames.append(LandmarkFrame(base + drift + noise))
    return LandmarkSequence(tuple(frames), fps, width, height, base.shape[0])


@pytest.fixture
def mini_sequence() -> LandmarkSequence:
    return make_mini_sequence()


def random_sequence(seed: int, n_frames: int = 2, topology: int = 478,
                    width: int = 640, height: int = 480,
                    with_timestamps: bool = False) -> LandmarkSequence:
    gen = np.random.default_rng(seed)
    coords = gen.uniform(-0.2, 1.2, size=(n_frames, topology, 2))
    stamps = [40 * i for i in range(n_frames)] if with_timestamps else None
    return LandmarkSequence.from_array(coords, fps=25.0, source_width=width,
                                       source_height=height, timestamps_ms=stamps)


def make_wav_bytes(samples: np.ndarray, sample_rate: int = 16000, channels: int = 1) -> bytes:
    """Build PCM16 WAV bytes directly with the stdlib, outside the package."""
    data = np.asarray(samples, dtype="<i2")
    buf = io.BytesIO()
    with wave.open(buf, "wb") as fh:
        fh.setnchannels(channels)
        fh.setsampwidth(2)
        fh.setframerate(sample_rate)
        fh.writeframes(data.tobytes())
    return buf.getvalue()
