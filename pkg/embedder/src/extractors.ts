import { existsSync, readFileSync } from "node:fs";
import { join, dirname } from "node:path";

import { RasterImage, resizeNearest } from "./image.js";

export type ExtractorKind =
  | "sscd-sheet"
  | "sscd-frame-mean"
  | "i3d"
  | "raster-sheet"
  | "raster-frame-mean";

export const EXTRACTOR_KINDS: ExtractorKind[] = [
  "sscd-sheet",
  "sscd-frame-mean",
  "i3d",
  "raster-sheet",
  "raster-frame-mean",
];

/** One embedder per input granularity; the job runner dispatches on `kind`. */
export interface SheetEmbedder {
  kind: "sheet";
  tag: string;
  embed(sheet: RasterImage): Promise<Float64Array>;
}

export interface FrameEmbedder {
  kind: "frame-mean";
  tag: string;
  embed(frame: RasterImage): Promise<Float64Array>;
}

export interface ClipEmbedder {
  kind: "clip";
  tag: string;
  embed(frames: RasterImage[]): Promise<Float64Array>;
}

export type Embedder = SheetEmbedder | FrameEmbedder | ClipEmbedder;

export function l2Normalize(values: Float64Array): Float64Array {
  let sq = 0;
  for (const v of values) sq += v * v;
  const norm = Math.sqrt(sq);
  if (norm === 0) {
    // All-zero input (e.g. a fully black sheet): fall back to a fixed unit
    // vector so downstream cosine stays well defined and deterministic.
    const out = new Float64Array(values.length);
    out.fill(1 / Math.sqrt(values.length));
    return out;
  }
  const out = new Float64Array(values.length);
  for (let i = 0; i < values.length; i++) out[i] = values[i] / norm;
  return out;
}

export function meanVector(rows: Float64Array[]): Float64Array {
  const out = new Float64Array(rows[0].length);
  for (const row of rows) {
    for (let i = 0; i < out.length; i++) out[i] += row[i];
  }
  for (let i = 0; i < out.length; i++) out[i] /= rows.length;
  return out;
}

export const RASTER_SIDE = 16;

/**
 * Model-free descriptor: downsample to a fixed grid, centre the channel
 * values, L2-normalize. Pure integer/double arithmetic, so runs are
 * bit-reproducible anywhere; useful for pipeline testing and as a weak
 * pixel-level copy signal.
 */
export function rasterDescriptor(img: RasterImage, side: number = RASTER_SIDE): Float64Array {
  const small = resizeNearest(img, side, side);
  const n = side * side * 3;
  const values = new Float64Array(n);
  let mean = 0;
  for (let i = 0; i < n; i++) {
    values[i] = small.pixels[i] / 255;
    mean += values[i];
  }
  mean /= n;
  for (let i = 0; i < n; i++) values[i] -= mean;
  return l2Normalize(values);
}

function rasterSheetEmbedder(): SheetEmbedder {
  return {
    kind: "sheet",
    tag: "raster-sheet",
    embed: async (sheet) => rasterDescriptor(sheet),
  };
}

function rasterFrameEmbedder(): FrameEmbedder {
  return {
    kind: "frame-mean",
    tag: "raster-frame-mean",
    embed: async (frame) => rasterDescriptor(frame),
  };
}

export interface GraphArtifacts {
  modelTopology: unknown;
  weightSpecs: unknown[];
  weightData: ArrayBuffer;
}

/**
 * Assemble tfjs graph-model artifacts from a directory holding model.json
 * plus its weight shards. Kept separate from the model runtime so the
 * directory parsing is testable without any ML dependency installed.
 */
export function readGraphArtifacts(weightsDir: string): GraphArtifacts {
  const modelPath = join(weightsDir, "model.json");
  if (!existsSync(modelPath)) {
    throw new RangeError(`no model.json under weights directory ${weightsDir}`);
  }
  const spec = JSON.parse(readFileSync(modelPath, "utf-8"));
  const manifest = spec.weightsManifest;
  if (!Array.isArray(manifest)) {
    throw new Error(`${modelPath}: missing weightsManifest`);
  }
  const weightSpecs: unknown[] = [];
  const shards: Buffer[] = [];
  for (const group of manifest) {
    weightSpecs.push(...(group.weights ?? []));
    for (const rel of group.paths ?? []) {
      shards.push(readFileSync(join(dirname(modelPath), rel)));
    }
  }
  const blob = Buffer.concat(shards);
  const weightData = blob.buffer.slice(blob.byteOffset, blob.byteOffset + blob.byteLength);
  return { modelTopology: spec.modelTopology, weightSpecs, weightData };
}

const IMAGENET_MEAN = [0.485, 0.456, 0.406];
const IMAGENET_STD = [0.229, 0.224, 0.225];

async function importTf(): Promise<any> {
  try {
    return await import("@tensorflow/tfjs");
  } catch (err) {
    throw new Error(
      "model-backed extractors need the optional @tensorflow/tfjs dependency; " +
        `install it or use a raster-* extractor (${(err as Error).message})`,
    );
  }
}

async function loadModel(weightsDir: string): Promise<{ tf: any; model: any }> {
  // Read the artifacts before touching the heavy ML import so a bad
  // weights directory fails fast with a precise message.
  const artifacts = readGraphArtifacts(weightsDir);
  const tf = await importTf();
  try {
    const model = await tf.loadGraphModel(tf.io.fromMemory(artifacts));
    return { tf, model };
  } catch (err) {
    throw new Error(`cannot load graph model from ${weightsDir}: ${(err as Error).message}`);
  }
}

function imageToNormalizedTensor(tf: any, img: RasterImage): any {
  const n = img.width * img.height * 3;
  const data = new Float32Array(n);
  for (let i = 0; i < n; i++) {
    const ch = i % 3;
    data[i] = (img.pixels[i] / 255 - IMAGENET_MEAN[ch]) / IMAGENET_STD[ch];
  }
  return tf.tensor4d(data, [1, img.height, img.width, 3]);
}

async function runImageModel(tf: any, model: any, img: RasterImage): Promise<Float64Array> {
  const input = imageToNormalizedTensor(tf, img);
  try {
    const out = model.predict(input);
    const tensor = Array.isArray(out) ? out[0] : out;
    const flat = await tensor.data();
    tf.dispose(out);
    return l2Normalize(Float64Array.from(flat));
  } catch (err) {
    throw new Error(`inference failed: ${(err as Error).message}`);
  } finally {
    input.dispose();
  }
}

async function sscdEmbedder(kind: "sscd-sheet" | "sscd-frame-mean", weightsDir: string): Promise<Embedder> {
  const { tf, model } = await loadModel(weightsDir);
  const embed = (img: RasterImage) => runImageModel(tf, model, img);
  if (kind === "sscd-sheet") return { kind: "sheet", tag: "sscd-sheet", embed };
  return { kind: "frame-mean", tag: "sscd-frame-mean", embed };
}

async function i3dEmbedder(weightsDir: string): Promise<ClipEmbedder> {
  const { tf, model } = await loadModel(weightsDir);
  return {
    kind: "clip",
    tag: "i3d-logits",
    embed: async (frames) => {
      const t = frames.length;
      const h = frames[0].height;
      const w = frames[0].width;
      const data = new Float32Array(t * h * w * 3);
      for (let f = 0; f < t; f++) {
        const px = frames[f].pixels;
        const base = f * h * w * 3;
        // Kinetics I3D convention: RGB scaled to [-1, 1].
        for (let i = 0; i < h * w * 3; i++) data[base + i] = (px[i] / 255) * 2 - 1;
      }
      const input = tf.tensor5d(data, [1, t, h, w, 3]);
      try {
        const out = model.predict(input);
        const tensor = Array.isArray(out) ? out[0] : out;
        const flat = await tensor.data();
        tf.dispose(out);
        return Float64Array.from(flat);
      } catch (err) {
        throw new Error(`inference failed: ${(err as Error).message}`);
      } finally {
        input.dispose();
      }
    },
  };
}

export async function makeEmbedder(kind: ExtractorKind, weightsDir?: string): Promise<Embedder> {
  if (kind === "raster-sheet") return rasterSheetEmbedder();
  if (kind === "raster-frame-mean") return rasterFrameEmbedder();
  if (weightsDir === undefined) {
    throw new RangeError(`extractor ${kind} needs pretrained weights; pass --weights <dir>`);
  }
  if (kind === "sscd-sheet" || kind === "sscd-frame-mean") return sscdEmbedder(kind, weightsDir);
  return i3dEmbedder(weightsDir);
}
