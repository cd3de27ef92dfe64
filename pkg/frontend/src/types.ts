/** Shared data shapes mirroring the toolkit's documented file formats. */

export interface LandmarkSequenceData {
  fps: number;
  /** source frame width in pixels */
  width: number;
  /** source frame height in pixels */
  height: number;
  topologySize: number;
  /** frames[f][i] = [x, y] in normalized coordinates */
  frames: number[][][];
  /** optional per-frame timestamps, milliseconds */
  timestampsMs?: (number | null)[];
}

export interface FacePartData {
  indices: number[];
  edges?: [number, number][];
}

export interface PartitionData {
  topologySize: number;
  parts: Record<string, FacePartData>;
}

export interface PartMaskData {
  kept: Record<string, boolean>;
}

export interface RlsOptions {
  dropProb?: number;
  seed?: number;
  /** one mask per clip (default) vs one per frame */
  perClip?: boolean;
}

export interface RenderOptions {
  width?: number;
  height?: number;
  pointRadius?: number;
  drawEdges?: boolean;
  grayscale?: boolean;
}

export interface RetargetOptions {
  anchorIndex?: number;
  fullFaceOnly?: boolean;
  partFitThreshold?: number;
}

export interface TransformDiagnostics {
  /** row-major [a, b, tx, c, d, ty] */
  full: number[];
  residuals: Record<string, number[]>;
  anchor_index: number;
}

export interface RetargetResult {
  sequence: LandmarkSequenceData;
  diagnostics: TransformDiagnostics;
}

/** Row-major 8-bit RGB buffer, length = width * height * 3. */
export interface RawImage {
  width: number;
  height: number;
  data: Uint8Array;
}

export interface SsimOptions {
  window?: number;
  sigma?: number;
  k1?: number;
  k2?: number;
}

export interface SsimReport {
  perFrame: number[];
  mean: number;
}
