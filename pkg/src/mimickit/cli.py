"""Batch command-line front-end.

Subcommands: convert, retarget, rasterize, mask, audio augment,
audio window, ssim, weights. All randomness hangs off --seed; identical
inputs plus seed produce byte-identical artifacts. Exit codes: 0 success,
2 input/parse error, 3 numerical/degenerate-geometry error.

``MIMIC_LOG`` sets verbosity (debug/info/warning/error).
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from . import audio as audio_mod
from . import conditioning, losses, quality
from .errors import FormatError, MimicError, NumericalError
from .landmarks import (
    CANONICAL_FORMAT,
    LandmarkSequence,
    default_partition,
    load_partition,
    parse_mediapipe_export,
    read_canonical,
    write_canonical,
)
from .retarget import RetargetOptions, retarget_sequence

log = logging.getLogger("mimickit")


def _setup_logging() -> None:
    level_name = os.environ.get("MIMIC_LOG", "warning").upper()
    level = getattr(logging, level_name, logging.WARNING)
    logging.basicConfig(level=level, format="[%(levelname)s] %(name)s: %(message)s")


def _read_sequence(path: Path) -> LandmarkSequence:
    data = path.read_bytes()
    doc_head = data.lstrip()[:512]
    if CANONICAL_FORMAT.encode() in doc_head:
        return read_canonical(data)
    report = parse_mediapipe_export(data)
    if report.out_of_range_count:
        log.warning(
            "%s: %d coordinate(s) outside [-0.5, 1.5]", path, report.out_of_range_count
        )
    return report.sequence


def _read_partition(path: Path | None):
    if path is None:
        return default_partition()
    return load_partition(path.read_bytes())


def _write_json(path: Path, doc: Any) -> None:
    path.write_bytes((json.dumps(doc, separators=(",", ":"), sort_keys=True) + "\n").encode())


def _load_config(path: Path | None) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"malformed config file: {exc}") from exc
    if not isinstance(doc, dict):
        raise FormatError("config file must hold a JSON object")
    return doc


def _parse_snr(text: str) -> float:
    if text.lower() in ("clean", "inf", "+inf"):
        return float("inf")
    try:
        return float(text)
    except ValueError as exc:
        raise FormatError(f"--snr expects a dB value or 'clean', got {text!r}") from exc


# ---------------------------------------------------------------------------
# subcommands

def _cmd_convert(args: argparse.Namespace) -> int:
    seq = _read_sequence(Path(args.input))
    Path(args.output).write_bytes(write_canonical(seq))
    log.info("wrote %s (%d frames)", args.output, len(seq))
    return 0


def _cmd_retarget(args: argparse.Namespace) -> int:
    driving = _read_sequence(Path(args.driving))
    reference_seq = _read_sequence(Path(args.reference))
    if not 0 <= args.reference_frame < len(reference_seq):
        raise FormatError(
            f"--reference-frame {args.reference_frame} out of range "
            f"for {len(reference_seq)} frames"
        )
    partition = _read_partition(Path(args.partition) if args.partition else None)
    opts = RetargetOptions(
        anchor_index=args.anchor,
        mode="full_face_only" if args.full_face_only else "part_aware",
        part_fit_threshold=args.part_fit_threshold,
    )
    result, residual_set = retarget_sequence(
        driving,
        reference_seq.frames[args.reference_frame],
        reference_seq.source_width,
        reference_seq.source_height,
        partition,
        opts,
    )
    Path(args.output).write_bytes(write_canonical(result))
    if args.diagnostics:
        _write_json(Path(args.diagnostics), residual_set.to_dict())
    log.info("retargeted %d frames onto %s", len(result), args.reference)
    return 0


def _mask_from_args(args: argparse.Namespace, partition) -> conditioning.PartMask | None:
    """Fixed mask when --mask/--drop-mouth given, else None (RLS applies)."""
    if getattr(args, "mask", None):
        doc = json.loads(Path(args.mask).read_text())
        if not isinstance(doc, dict) or not isinstance(doc.get("kept"), dict):
            raise FormatError("mask file must look like {\"kept\": {part: bool}}")
        return conditioning.PartMask(kept={k: bool(v) for k, v in doc["kept"].items()})
    if getattr(args, "drop_mouth", False):
        return conditioning.mouth_exclusion_mask(partition)
    return None


def _cmd_rasterize(args: argparse.Namespace) -> int:
    seq = _read_sequence(Path(args.landmarks))
    partition = _read_partition(Path(args.partition) if args.partition else None)
    opts = conditioning.RenderOptions(
        width=args.width,
        height=args.height,
        point_radius=args.radius,
        draw_edges=not args.no_edges,
        grayscale=args.grayscale,
    )
    fixed = _mask_from_args(args, partition)
    if fixed is not None:
        masks: conditioning.MaskSpec = fixed
        per_clip = True
    else:
        cfg = conditioning.RlsConfig(
            drop_prob=args.drop_prob, seed=args.seed, per_clip=not args.per_frame
        )
        masks = cfg
        per_clip = cfg.per_clip
    buffers, used_masks = conditioning.rasterize_sequence(
        seq, partition, masks, opts, clip_index=args.clip_index
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ext = "png" if args.format == "png" else "rgb"
    for i, buf in enumerate(buffers):
        path = out_dir / f"frame_{i:06d}.{ext}"
        if args.format == "png":
            conditioning.write_png(path, buf)
        else:
            path.write_bytes(conditioning.encode_raw_image(buf))
    audit = {
        "per_clip": per_clip,
        "masks": [m.to_dict() for m in (used_masks[:1] if per_clip else used_masks)],
    }
    _write_json(out_dir / "masks.json", audit)
    log.info("wrote %d frame image(s) to %s", len(buffers), out_dir)
    return 0


def _cmd_mask(args: argparse.Namespace) -> int:
    partition = _read_partition(Path(args.partition) if args.partition else None)
    if args.drop_mouth:
        mask = conditioning.mouth_exclusion_mask(partition)
    else:
        cfg = conditioning.RlsConfig(drop_prob=args.drop_prob, seed=args.seed)
        mask = conditioning.sample_mask(partition, cfg, args.draw_index)
    _write_json(Path(args.output), mask.to_dict())
    return 0


def _cmd_audio_augment(args: argparse.Namespace) -> int:
    wav = audio_mod.read_wav(Path(args.input).read_bytes())
    plan = audio_mod.AugmentationPlan(
        snr_db=_parse_snr(args.snr),
        gain_db=args.gain,
        shift_samples=args.shift,
        seed=args.seed,
    )
    Path(args.output).write_bytes(audio_mod.write_wav(audio_mod.augment(wav, plan)))
    return 0


def _cmd_audio_window(args: argparse.Namespace) -> int:
    features = audio_mod.read_features(Path(args.input).read_bytes())
    windowed = audio_mod.context_window(features, args.radius)
    out = Path(args.output)
    if out.suffix == ".json":
        out.write_bytes(audio_mod.write_features_json(windowed))
    else:
        out.write_bytes(audio_mod.write_features_binary(windowed))
    return 0


def _load_frames_dir(dir_path: Path) -> list:
    paths = sorted(
        p for p in dir_path.iterdir() if p.suffix.lower() in (".png", ".rgb")
    )
    if not paths:
        raise FormatError(f"no .png or .rgb frames in {dir_path}")
    frames = []
    for p in paths:
        if p.suffix.lower() == ".png":
            frames.append(conditioning.read_png(p))
        else:
            frames.append(conditioning.decode_raw_image(p.read_bytes()))
    return frames


def _cmd_ssim(args: argparse.Namespace) -> int:
    frames_a = _load_frames_dir(Path(args.dir_a))
    frames_b = _load_frames_dir(Path(args.dir_b))
    if len(frames_a) != len(frames_b):
        raise FormatError(
            f"frame count mismatch: {len(frames_a)} in {args.dir_a}, "
            f"{len(frames_b)} in {args.dir_b}"
        )
    params = quality.SsimParams(window=args.window, sigma=args.sigma, k1=args.k1, k2=args.k2)
    gray = [
        (quality.to_gray(a) / 255.0, quality.to_gray(b) / 255.0)
        for a, b in zip(frames_a, frames_b)
    ]
    report = quality.ssim_report([a for a, _ in gray], [b for _, b in gray], params)
    payload = (json.dumps(report, separators=(",", ":")) + "\n").encode()
    if args.output:
        Path(args.output).write_bytes(payload)
    sys.stdout.write(f"mean_ssim {report['mean']!r}\n")
    return 0


def _cmd_weights(args: argparse.Namespace) -> int:
    schedule = losses.weight_schedule(args.total_steps)
    lines = ["t,weight"] + [f"{t},{float(w)!r}" for t, w in enumerate(schedule)]
    payload = ("\n".join(lines) + "\n").encode()
    if args.output:
        Path(args.output).write_bytes(payload)
    else:
        sys.stdout.write(payload.decode())
    return 0


# ---------------------------------------------------------------------------
# parser

def _build_parser(config: dict[str, Any] | None = None) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mimickit",
        description="Landmark retargeting and conditioning toolkit",
    )
    parser.add_argument("--config", type=Path, default=None, help="JSON config file of flag defaults")
    top_sub = parser.add_subparsers(dest="command", required=True)

    built: list[argparse.ArgumentParser] = []

    class _Sub:
        """add_parser shim that tracks subparsers for config-default seeding."""

        def __init__(self, group):
            self.group = group

        def add_parser(self, *args, **kwargs):
            p = self.group.add_parser(*args, **kwargs)
            built.append(p)
            return p

    sub = _Sub(top_sub)

    p = sub.add_parser("convert", help="parse a landmark export and write the canonical document")
    p.add_argument("input")
    p.add_argument("output")

    p = sub.add_parser("retarget", help="retarget a driving sequence onto a reference face")
    p.add_argument("--driving", required=True)
    p.add_argument("--reference", required=True)
    p.add_argument("--reference-frame", type=int, default=0)
    p.add_argument("--partition", default=None, help="partition file (default: shipped 478-point)")
    p.add_argument("--anchor", type=int, default=0)
    p.add_argument("--full-face-only", action="store_true")
    p.add_argument("--part-fit-threshold", type=int, default=2)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--diagnostics", default=None, help="write transform diagnostics JSON here")

    p = sub.add_parser("rasterize", help="render landmark frames to condition images")
    p.add_argument("--landmarks", required=True)
    p.add_argument("--partition", default=None)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--format", choices=("png", "raw"), default="png")
    p.add_argument("--width", type=int, default=512)
    p.add_argument("--height", type=int, default=512)
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--no-edges", action="store_true")
    p.add_argument("--grayscale", action="store_true")
    p.add_argument("--mask", default=None, help="fixed mask file instead of random selection")
    p.add_argument("--drop-mouth", action="store_true", help="deterministic mask hiding the mouth part")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--drop-prob", type=float, default=0.5)
    p.add_argument("--per-frame", action="store_true", help="draw one mask per frame instead of per clip")
    p.add_argument("--clip-index", type=int, default=0)

    p = sub.add_parser("mask", help="sample or derive a part mask file")
    p.add_argument("--partition", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--draw-index", type=int, default=0)
    p.add_argument("--drop-prob", type=float, default=0.5)
    p.add_argument("--drop-mouth", action="store_true")
    p.add_argument("--out", dest="output", required=True)

    p_audio = sub.add_parser("audio", help="waveform augmentation and feature windowing")
    audio_sub = _Sub(p_audio.add_subparsers(dest="audio_command", required=True))

    p = audio_sub.add_parser("augment", help="noise/gain/shift a PCM16 WAV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--snr", default="clean", help="target SNR in dB, or 'clean'")
    p.add_argument("--gain", type=float, default=0.0)
    p.add_argument("--shift", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)

    p = audio_sub.add_parser("window", help="concatenate adjacent feature frames")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    p.add_argument("--radius", type=int, default=2)

    p = sub.add_parser("ssim", help="structural similarity between two frame directories")
    p.add_argument("dir_a")
    p.add_argument("dir_b")
    p.add_argument("--window", type=int, default=11)
    p.add_argument("--sigma", type=float, default=1.5)
    p.add_argument("--k1", type=float, default=0.01)
    p.add_argument("--k2", type=float, default=0.03)
    p.add_argument("--out", dest="output", default=None)

    p = sub.add_parser("weights", help="print the timestep weight schedule as CSV")
    p.add_argument("--T", dest="total_steps", type=int, required=True)
    p.add_argument("--out", dest="output", default=None)

    if config:
        # after all arguments exist, so action defaults get replaced too
        for built_parser in built:
            built_parser.set_defaults(**config)
    return parser


_HANDLERS = {
    "convert": _cmd_convert,
    "retarget": _cmd_retarget,
    "rasterize": _cmd_rasterize,
    "mask": _cmd_mask,
    "ssim": _cmd_ssim,
    "weights": _cmd_weights,
}


def main(argv: Sequence[str] | None = None) -> int:
    _setup_logging()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=Path, default=None)
    pre_args, _ = pre.parse_known_args(argv)
    try:
        config = _load_config(pre_args.config)
        # flat dest -> value map seeded as subparser defaults; explicit flags win
        parser = _build_parser(config or None)
        args = parser.parse_args(argv)
        if args.command == "audio":
            handler = _cmd_audio_augment if args.audio_command == "augment" else _cmd_audio_window
        else:
            handler = _HANDLERS[args.command]
        return handler(args)
    except NumericalError as exc:
        log.error("%s", exc)
        sys.stderr.write(f"error: {exc}\n")
        return 3
    except (FormatError, FileNotFoundError, NotADirectoryError, ValueError, json.JSONDecodeError) as exc:
        log.error("%s", exc)
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except MimicError as exc:
        log.error("%s", exc)
        sys.stderr.write(f"error: {exc}\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
