import type {
  FacePartData,
  LandmarkSequenceData,
  PartitionData,
  PartMaskData,
  RawImage,
} from "./types";

const CANONICAL_FORMAT = "mimic-landmarks";
const FEATURE_MAGIC = "MIMICFT1";
const RAW_IMAGE_MAGIC = "MIMG";

/** Throws unless frames is a finite (nFrames, topology, 2) array. */
export function validateFrames(frames: unknown, what: string): number[][][] {
  if (!Array.isArray(frames) || frames.length === 0) {
    throw new Error(`${what}: expected shape (n_frames, topology_size, 2), got empty or non-array`);
  }
  const topology = Array.isArray(frames[0]) ? (frames[0] as unknown[]).length : -1;
  for (const [f, frame] of (frames as unknown[]).entries()) {
    if (!Array.isArray(frame) || frame.length !== topology || topology < 1) {
      throw new Error(
        `${what}: expected shape (n_frames, topology_size, 2), ` +
        `frame ${f} has length ${Array.isArray(frame) ? frame.length : "non-array"} (topology ${topology})`,
      );
    }
    for (const [i, point] of (frame as unknown[]).entries()) {
      if (
        !Array.isArray(point) ||
        point.length !== 2 ||
        typeof point[0] !== "number" ||
        typeof point[1] !== "number" ||
        !Number.isFinite(point[0]) ||
        !Number.isFinite(point[1])
      ) {
        throw new Error(
          `${what}: expected shape (n_frames, topology_size, 2), ` +
          `frame ${f} point ${i} is not a finite [x, y] pair`,
        );
      }
    }
  }
  return frames as number[][][];
}

export function encodeCanonicalLandmarks(seq: LandmarkSequenceData): string {
  validateFrames(seq.frames, "landmark frames");
  const doc: Record<string, unknown> = {
    format: CANONICAL_FORMAT,
    version: "1",
    fps: seq.fps,
    width: seq.width,
    height: seq.height,
    topology_size: seq.topologySize,
    frames: seq.frames,
  };
  if (seq.timestampsMs && seq.timestampsMs.some((t) => t !== null)) {
    doc.timestamps_ms = seq.timestampsMs;
  }
  return JSON.stringify(doc) + "\n";
}

export function decodeCanonicalLandmarks(text: string): LandmarkSequenceData {
  const doc = JSON.parse(text);
  if (doc.format !== CANONICAL_FORMAT) {
    throw new Error(`not a ${CANONICAL_FORMAT} document`);
  }
  const out: LandmarkSequenceData = {
    fps: doc.fps,
    width: doc.width,
    height: doc.height,
    topologySize: doc.topology_size,
    frames: doc.frames,
  };
  if (doc.timestamps_ms) out.timestampsMs = doc.timestamps_ms;
  return out;
}

export function encodePartition(partition: PartitionData): string {
  const parts: Record<string, { indices: number[]; edges: number[][] }> = {};
  for (const [name, part] of Object.entries(partition.parts)) {
    parts[name] = { indices: part.indices, edges: (part.edges ?? []).map((e) => [...e]) };
  }
  return JSON.stringify({ topology_size: partition.topologySize, parts }) + "\n";
}

export function decodePartition(text: string): PartitionData {
  const doc = JSON.parse(text);
  const parts: Record<string, FacePartData> = {};
  for (const [name, raw] of Object.entries<Record<string, unknown>>(doc.parts)) {
    parts[name] = {
      indices: raw.indices as number[],
      edges: (raw.edges ?? []) as [number, number][],
    };
  }
  return { topologySize: doc.topology_size, parts };
}

export function encodeMask(mask: PartMaskData): string {
  return JSON.stringify({ kept: mask.kept }) + "\n";
}

export function decodeMask(text: string): PartMaskData {
  const doc = JSON.parse(text);
  if (typeof doc?.kept !== "object" || doc.kept === null) {
    throw new Error('mask document must look like {"kept": {part: bool}}');
  }
  return { kept: doc.kept };
}

export function decodeRawImage(buf: Buffer): RawImage {
  if (buf.length < 12 || buf.toString("latin1", 0, 4) !== RAW_IMAGE_MAGIC) {
    throw new Error("not a raw image document");
  }
  const width = buf.readUInt32LE(4);
  const height = buf.readUInt32LE(8);
  const payload = buf.subarray(12);
  if (payload.length !== width * height * 3) {
    throw new Error(`raw image payload has ${payload.length} bytes, expected ${width * height * 3}`);
  }
  return { width, height, data: new Uint8Array(payload) };
}

export function encodeRawImage(img: RawImage): Buffer {
  if (img.data.length !== img.width * img.height * 3) {
    throw new Error(
      `raw image buffer must hold width*height*3 = ${img.width * img.height * 3} bytes, ` +
      `got ${img.data.length}`,
    );
  }
  const header = Buffer.alloc(12);
  header.write(RAW_IMAGE_MAGIC, 0, "latin1");
  header.writeUInt32LE(img.width, 4);
  header.writeUInt32LE(img.height, 8);
  return Buffer.concat([header, Buffer.from(img.data)]);
}

/** Rectangular (n, d) check for feature matrices. */
export function validateRows(rows: unknown, what: string): number[][] {
  if (!Array.isArray(rows) || rows.length === 0) {
    throw new Error(`${what}: expected a non-empty (n, d) array of numbers`);
  }
  const d = Array.isArray(rows[0]) ? (rows[0] as unknown[]).length : -1;
  for (const [i, row] of (rows as unknown[]).entries()) {
    if (!Array.isArray(row) || row.length !== d || d < 1) {
      throw new Error(`${what}: expected rectangular (n, d) rows, row ${i} breaks width ${d}`);
    }
    for (const v of row as unknown[]) {
      if (typeof v !== "number" || !Number.isFinite(v)) {
        throw new Error(`${what}: row ${i} contains a non-finite value`);
      }
    }
  }
  return rows as number[][];
}

export function encodeFeaturesBinary(rows: number[][], frameRate: number): Buffer {
  validateRows(rows, "feature rows");
  const n = rows.length;
  const d = rows[0].length;
  const buf = Buffer.alloc(8 + 4 + 4 + 8 + n * d * 8);
  buf.write(FEATURE_MAGIC, 0, "latin1");
  buf.writeUInt32LE(n, 8);
  buf.writeUInt32LE(d, 12);
  buf.writeDoubleLE(frameRate, 16);
  let offset = 24;
  for (const row of rows) {
    for (const v of row) {
      buf.writeDoubleLE(v, offset);
      offset += 8;
    }
  }
  return buf;
}

export function decodeFeaturesBinary(buf: Buffer): { rows: number[][]; frameRate: number } {
  if (buf.length < 24 || buf.toString("latin1", 0, 8) !== FEATURE_MAGIC) {
    throw new Error("not a feature binary document");
  }
  const n = buf.readUInt32LE(8);
  const d = buf.readUInt32LE(12);
  const frameRate = buf.readDoubleLE(16);
  if (buf.length !== 24 + n * d * 8) {
    throw new Error(`feature payload has ${buf.length - 24} bytes, expected ${n * d * 8}`);
  }
  const rows: number[][] = [];
  let offset = 24;
  for (let i = 0; i < n; i++) {
    const row: number[] = [];
    for (let j = 0; j < d; j++) {
      row.push(buf.readDoubleLE(offset));
      offset += 8;
    }
    rows.push(row);
  }
  return { rows, frameRate };
}

/** Parse the weight-schedule CSV into weights[t]. */
export function parseWeightsCsv(text: string): number[] {
  const lines = text.trim().split("\n");
  if (lines[0] !== "t,weight") throw new Error("unexpected weight CSV header");
  return lines.slice(1).map((line, i) => {
    const [t, w] = line.split(",");
    if (Number(t) !== i) throw new Error(`weight CSV rows out of order at ${i}`);
    return Number(w);
  });
}
