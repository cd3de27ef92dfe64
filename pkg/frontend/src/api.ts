import { mkdirSync, readdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import {
  decodeCanonicalLandmarks,
  decodeMask,
  decodeFeaturesBinary,
  decodeRawImage,
  encodeCanonicalLandmarks,
  encodeFeaturesBinary,
  encodePartition,
  encodeMask,
  encodeRawImage,
  parseWeightsCsv,
  validateFrames,
  validateRows,
} from "./formats";
import { runCli, withTempDir } from "./runner";
import type {
  LandmarkSequenceData,
  PartitionData,
  PartMaskData,
  RawImage,
  RenderOptions,
  RetargetOptions,
  RetargetResult,
  RlsOptions,
  SsimOptions,
  SsimReport,
  TransformDiagnostics,
} from "./types";

function writePartition(dir: string, partition: PartitionData): string {
  const path = join(dir, "partition.json");
  writeFileSync(path, encodePartition(partition));
  return path;
}

function writeSequence(dir: string, name: string, seq: LandmarkSequenceData): string {
  const path = join(dir, name);
  writeFileSync(path, encodeCanonicalLandmarks(seq));
  return path;
}

/**
 * Retarget a driving sequence onto a reference face.
 *
 * `reference` is a single landmark frame plus its pixel dimensions; the
 * result is normalized to those dimensions. Returns the retargeted
 * sequence and the transform diagnostics (full-face matrix, per-part
 * residuals).
 */
export function retargetSequence(
  driving: LandmarkSequenceData,
  reference: { frame: number[][]; width: number; height: number },
  partition: PartitionData,
  opts: RetargetOptions = {},
): RetargetResult {
  validateFrames([reference.frame], "reference frame");
  return withTempDir((dir) => {
    const drivingPath = writeSequence(dir, "driving.json", driving);
    const referencePath = writeSequence(dir, "reference.json", {
      fps: driving.fps,
      width: reference.width,
      height: reference.height,
      topologySize: reference.frame.length,
      frames: [reference.frame],
    });
    const partitionPath = writePartition(dir, partition);
    const outPath = join(dir, "retargeted.json");
    const diagPath = join(dir, "diagnostics.json");
    const args = [
      "retarget",
      "--driving", drivingPath,
      "--reference", referencePath,
      "--partition", partitionPath,
      "--out", outPath,
      "--diagnostics", diagPath,
      "--anchor", String(opts.anchorIndex ?? 0),
      "--part-fit-threshold", String(opts.partFitThreshold ?? 2),
    ];
    if (opts.fullFaceOnly) args.push("--full-face-only");
    runCli(args);
    return {
      sequence: decodeCanonicalLandmarks(readFileSync(outPath, "utf8")),
      diagnostics: JSON.parse(readFileSync(diagPath, "utf8")) as TransformDiagnostics,
    };
  });
}

function rasterizeArgs(
  dir: string,
  landmarksPath: string,
  partitionPath: string,
  outDir: string,
  opts: RenderOptions,
): string[] {
  const args = [
    "rasterize",
    "--landmarks", landmarksPath,
    "--partition", partitionPath,
    "--out-dir", outDir,
    "--format", "raw",
    "--width", String(opts.width ?? 512),
    "--height", String(opts.height ?? 512),
    "--radius", String(opts.pointRadius ?? 2),
  ];
  if (opts.drawEdges === false) args.push("--no-edges");
  if (opts.grayscale) args.push("--grayscale");
  return args;
}

function readRawFrames(outDir: string): RawImage[] {
  return readdirSync(outDir)
    .filter((name) => name.endsWith(".rgb"))
    .sort()
    .map((name) => decodeRawImage(readFileSync(join(outDir, name))));
}

/**
 * Render every frame of a sequence to raw RGB buffers.
 *
 * `masks` is a fixed mask applied to all frames, or RLS options for
 * seeded random part selection. Returns the buffers plus the masks the
 * renderer actually used (one entry when a single mask covers the clip).
 */
export function rasterizeSequence(
  seq: LandmarkSequenceData,
  partition: PartitionData,
  masks: PartMaskData | RlsOptions,
  opts: RenderOptions = {},
): { frames: RawImage[]; masks: PartMaskData[] } {
  return withTempDir((dir) => {
    const landmarksPath = writeSequence(dir, "landmarks.json", seq);
    const partitionPath = writePartition(dir, partition);
    const outDir = join(dir, "frames");
    const args = rasterizeArgs(dir, landmarksPath, partitionPath, outDir, opts);
    if ("kept" in masks) {
      const maskPath = join(dir, "mask.json");
      writeFileSync(maskPath, encodeMask(masks));
      args.push("--mask", maskPath);
    } else {
      args.push("--seed", String(masks.seed ?? 0), "--drop-prob", String(masks.dropProb ?? 0.5));
      if (masks.perClip === false) args.push("--per-frame");
    }
    runCli(args);
    const audit = JSON.parse(readFileSync(join(outDir, "masks.json"), "utf8"));
    return {
      frames: readRawFrames(outDir),
      masks: (audit.masks as { kept: Record<string, boolean> }[]).map((m) => ({ kept: m.kept })),
    };
  });
}

/** Render a single landmark frame under a fixed mask. */
export function rasterizeFrame(
  frame: number[][],
  partition: PartitionData,
  mask: PartMaskData,
  opts: RenderOptions = {},
): RawImage {
  validateFrames([frame], "landmark frame");
  const seq: LandmarkSequenceData = {
    fps: 25,
    width: opts.width ?? 512,
    height: opts.height ?? 512,
    topologySize: frame.length,
    frames: [frame],
  };
  return rasterizeSequence(seq, partition, mask, opts).frames[0];
}

/** Draw one keep/drop mask; deterministic in (partition, seed, drawIndex). */
export function sampleMask(
  partition: PartitionData,
  opts: RlsOptions,
  drawIndex: number,
): PartMaskData {
  return withTempDir((dir) => {
    const partitionPath = writePartition(dir, partition);
    const outPath = join(dir, "mask.json");
    runCli([
      "mask",
      "--partition", partitionPath,
      "--seed", String(opts.seed ?? 0),
      "--drop-prob", String(opts.dropProb ?? 0.5),
      "--draw-index", String(drawIndex),
      "--out", outPath,
    ]);
    return decodeMask(readFileSync(outPath, "utf8"));
  });
}

/** Deterministic mask keeping every part except "mouth". */
export function mouthExclusionMask(partition: PartitionData): PartMaskData {
  return withTempDir((dir) => {
    const partitionPath = writePartition(dir, partition);
    const outPath = join(dir, "mask.json");
    runCli(["mask", "--partition", partitionPath, "--drop-mouth", "--out", outPath]);
    return decodeMask(readFileSync(outPath, "utf8"));
  });
}

/**
 * Per-landmark visibility flags under a mask: a landmark is visible when
 * it belongs to no part or its part is kept. Pure lookup over the
 * documented partition/mask shapes.
 */
export function applyMask(
  topologySize: number,
  partition: PartitionData,
  mask: PartMaskData,
): boolean[] {
  const partNames = Object.keys(partition.parts).sort();
  const maskNames = Object.keys(mask.kept).sort();
  if (JSON.stringify(partNames) !== JSON.stringify(maskNames)) {
    throw new Error(
      `mask parts [${maskNames}] do not match partition parts [${partNames}]`,
    );
  }
  const visible = new Array<boolean>(topologySize).fill(true);
  for (const [name, part] of Object.entries(partition.parts)) {
    if (!mask.kept[name]) {
      for (const i of part.indices) visible[i] = false;
    }
  }
  return visible;
}

/** Concatenate each feature row with its +-radius neighbors (edges replicate). */
export function contextWindow(rows: number[][], radius: number, frameRate = 25): number[][] {
  validateRows(rows, "feature rows");
  return withTempDir((dir) => {
    const inPath = join(dir, "features.bin");
    writeFileSync(inPath, encodeFeaturesBinary(rows, frameRate));
    const outPath = join(dir, "windowed.bin");
    runCli(["audio", "window", "--in", inPath, "--out", outPath, "--radius", String(radius)]);
    return decodeFeaturesBinary(readFileSync(outPath)).rows;
  });
}

const scheduleCache = new Map<number, number[]>();

/** Full cosine falloff schedule w(0..T). */
export function weightSchedule(totalSteps: number): number[] {
  const cached = scheduleCache.get(totalSteps);
  if (cached) return cached;
  const schedule = withTempDir((dir) => {
    const outPath = join(dir, "weights.csv");
    runCli(["weights", "--T", String(totalSteps), "--out", outPath]);
    return parseWeightsCsv(readFileSync(outPath, "utf8"));
  });
  scheduleCache.set(totalSteps, schedule);
  return schedule;
}

/** Cosine falloff weight w(t) = cos(t*pi/(2T)). */
export function timestepWeight(t: number, totalSteps: number): number {
  if (!Number.isInteger(t) || t < 0 || t > totalSteps) {
    throw new Error(`t must be an integer in [0, ${totalSteps}], got ${t}`);
  }
  return weightSchedule(totalSteps)[t];
}

/** Timestep-weighted pixel-space loss: w(t) * (mse + perceptual). */
export function spatialLoss(
  t: number,
  totalSteps: number,
  mse: number,
  perceptual: number,
): number {
  if (mse < 0 || perceptual < 0) throw new Error("loss components must be non-negative");
  return timestepWeight(t, totalSteps) * (mse + perceptual);
}

function writeRawFrames(dir: string, frames: RawImage[]): void {
  frames.forEach((img, i) => {
    writeFileSync(join(dir, `frame_${String(i).padStart(6, "0")}.rgb`), encodeRawImage(img));
  });
}

/** Mean structural similarity between two equal-length image lists. */
export function ssimSequence(
  framesA: RawImage[],
  framesB: RawImage[],
  opts: SsimOptions = {},
): SsimReport {
  if (framesA.length !== framesB.length || framesA.length === 0) {
    throw new Error(
      `need equal non-empty frame lists, got ${framesA.length} and ${framesB.length}`,
    );
  }
  return withTempDir((dir) => {
    const dirA = join(dir, "a");
    const dirB = join(dir, "b");
    mkdirSync(dirA);
    mkdirSync(dirB);
    writeRawFrames(dirA, framesA);
    writeRawFrames(dirB, framesB);
    const outPath = join(dir, "report.json");
    const args = ["ssim", dirA, dirB, "--out", outPath];
    if (opts.window !== undefined) args.push("--window", String(opts.window));
    if (opts.sigma !== undefined) args.push("--sigma", String(opts.sigma));
    if (opts.k1 !== undefined) args.push("--k1", String(opts.k1));
    if (opts.k2 !== undefined) args.push("--k2", String(opts.k2));
    runCli(args);
    const report = JSON.parse(readFileSync(outPath, "utf8"));
    return { perFrame: report.per_frame, mean: report.mean };
  });
}

/** Structural similarity of one image pair. */
export function ssim(imageA: RawImage, imageB: RawImage, opts: SsimOptions = {}): number {
  return ssimSequence([imageA], [imageB], opts).mean;
}
