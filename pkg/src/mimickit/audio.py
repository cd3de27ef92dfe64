"""Audio I/O, training-time augmentation, and feature context windowing.

WAV support is deliberately narrow: RIFF PCM16, mono or stereo in, mono out,
samples scaled to [-1, 1] by 1/32768. All augmentations preserve length and
sample rate, clamp into [-1, 1], and are deterministic under a fixed seed.
"""
from __future__ import annotations

import io
import json
import math
import struct
import wave
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import rng
from .errors import FormatError, NumericalError

PCM_SCALE = 32768.0

FEATURE_MAGIC = b"MIMICFT1"
FEATURE_FORMAT = "mimic-features"


@dataclass(frozen=True, eq=False)
class Waveform:
    """Mono audio samples in [-1, 1]."""

    samples: np.ndarray  # (n,) float64, read-only
    sample_rate: int
    channels: int = 1

    def __post_init__(self) -> None:
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError(f"samples must be 1-D, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples contain non-finite values")
        if arr.size and (arr.min() < -1.0 or arr.max() > 1.0):
            raise ValueError("samples outside [-1, 1]")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.channels != 1:
            raise ValueError("only mono waveforms are represented")

    def __len__(self) -> int:
        return int(self.samples.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Waveform):
            return NotImplemented
        return self.sample_rate == other.sample_rate and bool(
            np.array_equal(self.samples, other.samples)
        )


@dataclass(frozen=True, eq=False)
class FeatureSequence:
    """Per-frame feature vectors (n frames x d dims)."""

    rows: np.ndarray  # (n, d) float64
    frame_rate: float

    def __post_init__(self) -> None:
        arr = np.asarray(self.rows, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"rows must be 2-D, got shape {arr.shape}")
        if arr.shape[1] < 1:
            raise ValueError("feature dimension must be >= 1")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "rows", arr)
        if not (math.isfinite(self.frame_rate) and self.frame_rate > 0):
            raise ValueError(f"frame_rate must be positive, got {self.frame_rate}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FeatureSequence):
            return NotImplemented
        return self.frame_rate == other.frame_rate and bool(
            np.array_equal(self.rows, other.rows)
        )


@dataclass(frozen=True)
class AugmentationPlan:
    """One augmentation recipe: noise at target SNR, gain, then shift.

    ``snr_db=None`` (or +inf) means no noise. Noise power is set relative to
    the input signal, so the plan's steps apply in the documented order:
    noise, gain, shift.
    """

    snr_db: float | None = None
    gain_db: float = 0.0
    shift_samples: int = 0
    seed: int = 0


def read_wav(data: bytes) -> Waveform:
    """Parse a RIFF PCM16 WAV (1-2 channels; stereo is mean-downmixed)."""
    try:
        with wave.open(io.BytesIO(data), "rb") as wav:
            n_channels = wav.getnchannels()
            sample_width = wav.getsampwidth()
            sample_rate = wav.getframerate()
            n_frames = wav.getnframes()
            payload = wav.readframes(n_frames)
    except (wave.Error, EOFError) as exc:
        raise FormatError(f"unreadable WAV: {exc}") from exc
    if sample_width != 2:
        raise FormatError(f"unsupported bit depth: {8 * sample_width}-bit (need 16-bit PCM)")
    if n_channels not in (1, 2):
        raise FormatError(f"unsupported channel count: {n_channels}")
    if len(payload) != n_frames * 2 * n_channels:
        raise FormatError("truncated WAV data chunk")
    samples = np.frombuffer(payload, dtype="<i2").astype(np.float64) / PCM_SCALE
    if n_channels == 2:
        samples = samples.reshape(-1, 2).mean(axis=1)
    return Waveform(samples=samples, sample_rate=sample_rate)


def write_wav(w: Waveform) -> bytes:
    """Serialize as PCM16 mono; read_wav(write_wav(w)) == w within 1 LSB."""
    quantized = np.clip(np.rint(w.samples * PCM_SCALE), -32768, 32767).astype("<i2")
    buf = io.BytesIO()
    with wave.open(buf, "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(w.sample_rate)
        wav.writeframes(quantized.tobytes())
    return buf.getvalue()


def add_noise(w: Waveform, snr_db: float, seed: int) -> Waveform:
    """Add Gaussian noise at the requested signal-to-noise ratio (dB).

    ``snr_db=inf`` returns the input untouched. Output is clamped to [-1, 1]
    and identical for identical (waveform, snr_db, seed).
    """
    if math.isinf(snr_db) and snr_db > 0:
        return w
    if not math.isfinite(snr_db):
        raise ValueError(f"snr_db must be finite or +inf, got {snr_db}")
    power = float(np.mean(w.samples**2)) if len(w) else 0.0
    if power == 0.0:
        raise NumericalError("zero-power signal: SNR undefined")
    noise_power = power / (10.0 ** (snr_db / 10.0))
    noise = rng.normal_array(rng.derive_key(seed, "awgn"), len(w)) * math.sqrt(noise_power)
    return Waveform(np.clip(w.samples + noise, -1.0, 1.0), w.sample_rate)


def apply_gain(w: Waveform, gain_db: float) -> Waveform:
    """Scale by 10^(gain_db/20), clamped to [-1, 1]."""
    factor = 10.0 ** (gain_db / 20.0)
    return Waveform(np.clip(w.samples * factor, -1.0, 1.0), w.sample_rate)


def time_shift(w: Waveform, shift_samples: int) -> Waveform:
    """Shift in time, zero-padding the vacated end; length preserved.

    Positive delays (pads the head), negative advances (pads the tail).
    """
    n = len(w)
    if abs(shift_samples) > n:
        raise ValueError(f"|shift| = {abs(shift_samples)} exceeds length {n}")
    if shift_samples == 0:
        return w
    if shift_samples > 0:
        shifted = np.concatenate([np.zeros(shift_samples), w.samples[: n - shift_samples]])
    else:
        k = -shift_samples
        shifted = np.concatenate([w.samples[k:], np.zeros(k)])
    return Waveform(shifted, w.sample_rate)


def augment(w: Waveform, plan: AugmentationPlan) -> Waveform:
    """Apply a full augmentation plan: noise, then gain, then shift."""
    out = w
    if plan.snr_db is not None and not (math.isinf(plan.snr_db) and plan.snr_db > 0):
        out = add_noise(out, plan.snr_db, plan.seed)
    if plan.gain_db != 0.0:
        out = apply_gain(out, plan.gain_db)
    if plan.shift_samples != 0:
        out = time_shift(out, plan.shift_samples)
    return out


def context_window(features: FeatureSequence, radius: int) -> FeatureSequence:
    """Concatenate each frame with its +-radius neighbors (edges replicate).

    Output is n x (2*radius+1)*d; row t holds frames t-radius .. t+radius
    clamped into range.
    """
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    n, d = features.rows.shape
    if n < 1:
        raise ValueError("need at least one frame")
    if radius == 0:
        return FeatureSequence(features.rows, features.frame_rate)
    neighbor = np.clip(
        np.arange(n)[:, None] + np.arange(-radius, radius + 1)[None, :], 0, n - 1
    )
    stacked = features.rows[neighbor]  # (n, 2r+1, d)
    return FeatureSequence(stacked.reshape(n, (2 * radius + 1) * d), features.frame_rate)


def write_features_binary(features: FeatureSequence) -> bytes:
    """Flat little-endian layout: magic, u32 n, u32 d, f64 rate, row-major f64."""
    n, d = features.rows.shape
    header = FEATURE_MAGIC + struct.pack("<IId", n, d, features.frame_rate)
    return header + np.ascontiguousarray(features.rows, dtype="<f8").tobytes()


def read_features_binary(data: bytes) -> FeatureSequence:
    if len(data) < len(FEATURE_MAGIC) + 16 or data[: len(FEATURE_MAGIC)] != FEATURE_MAGIC:
        raise FormatError("not a feature binary document")
    n, d, frame_rate = struct.unpack_from("<IId", data, len(FEATURE_MAGIC))
    offset = len(FEATURE_MAGIC) + 16
    expected = n * d * 8
    payload = data[offset:]
    if len(payload) != expected:
        raise FormatError(f"feature payload has {len(payload)} bytes, expected {expected}")
    rows = np.frombuffer(payload, dtype="<f8").reshape(n, d)
    return FeatureSequence(rows=rows, frame_rate=frame_rate)


def write_features_json(features: FeatureSequence) -> bytes:
    doc = {
        "format": FEATURE_FORMAT,
        "version": "1",
        "frame_rate": float(features.frame_rate),
        "rows": [[float(v) for v in row] for row in features.rows],
    }
    return (json.dumps(doc, separators=(",", ":"), allow_nan=False) + "\n").encode("utf-8")


def read_features_json(data: bytes | str) -> FeatureSequence:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc: Any = json.loads(data)
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed feature document: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != FEATURE_FORMAT:
        raise FormatError(f"not a {FEATURE_FORMAT} document")
    if doc.get("version") != "1":
        raise FormatError(f"unsupported feature schema version {doc.get('version')!r}")
    try:
        rows = np.asarray(doc.get("rows"), dtype=np.float64)
    except ValueError as exc:
        raise FormatError(f"'rows' must be a rectangular numeric array: {exc}") from exc
    if rows.ndim != 2:
        raise FormatError("'rows' must be a rectangular 2-D array")
    return FeatureSequence(rows=rows, frame_rate=float(doc.get("frame_rate", 0.0)))


def read_features(data: bytes) -> FeatureSequence:
    """Dispatch on magic bytes: binary layout or the JSON variant."""
    if data[: len(FEATURE_MAGIC)] == FEATURE_MAGIC:
        return read_features_binary(data)
    return read_features_json(data)
