export {
  applyMask,
  contextWindow,
  mouthExclusionMask,
  rasterizeFrame,
  rasterizeSequence,
  retargetSequence,
  sampleMask,
  spatialLoss,
  ssim,
  ssimSequence,
  timestepWeight,
  weightSchedule,
} from "./api";
export {
  decodeCanonicalLandmarks,
  decodeFeaturesBinary,
  decodeMask,
  decodePartition,
  decodeRawImage,
  encodeCanonicalLandmarks,
  encodeFeaturesBinary,
  encodeMask,
  encodePartition,
  encodeRawImage,
  parseWeightsCsv,
} from "./formats";
export { CliError, InputError, NumericalError, cliCommand, runCli } from "./runner";
export type {
  FacePartData,
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

/** Mirrors the core library version. */
export const VERSION = "0.1.0";
