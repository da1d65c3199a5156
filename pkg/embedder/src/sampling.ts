import { readdirSync, statSync } from "node:fs";
import { join } from "node:path";

import { RasterImage, decodePng } from "./image.js";

/**
 * Evenly spaced frame indices: index i of k maps to round(i * (T - 1) / (k - 1)).
 * One requested frame always picks frame 0; a single-frame video repeats frame 0.
 */
export function sampleIndices(totalFrames: number, k: number): number[] {
  if (!Number.isInteger(totalFrames) || totalFrames < 1) {
    throw new RangeError(`totalFrames must be a positive integer, got ${totalFrames}`);
  }
  if (!Number.isInteger(k) || k < 1) {
    throw new RangeError(`frame count must be a positive integer, got ${k}`);
  }
  if (k === 1) return [0];
  if (totalFrames === 1) return new Array(k).fill(0);
  const indices: number[] = [];
  for (let i = 0; i < k; i++) {
    indices.push(Math.round((i * (totalFrames - 1)) / (k - 1)));
  }
  return indices;
}

const FRAME_EXT = /\.png$/i;

function naturalCompare(a: string, b: string): number {
  const re = /(\d+)|(\D+)/g;
  const pa = a.match(re) ?? [];
  const pb = b.match(re) ?? [];
  const n = Math.min(pa.length, pb.length);
  for (let i = 0; i < n; i++) {
    const x = pa[i];
    const y = pb[i];
    const nx = /^\d+$/.test(x);
    const ny = /^\d+$/.test(y);
    if (nx && ny) {
      const d = Number(x) - Number(y);
      if (d !== 0) return d;
    } else if (x !== y) {
      return x < y ? -1 : 1;
    }
  }
  return pa.length - pb.length;
}

/** PNG frame files of a video directory in natural order (frame_2 before frame_10). */
export function listFrameFiles(dir: string): string[] {
  let entries: string[];
  try {
    entries = readdirSync(dir);
  } catch (err) {
    throw new Error(`cannot list video directory ${dir}: ${(err as Error).message}`);
  }
  const frames = entries.filter((name) => FRAME_EXT.test(name)).sort(naturalCompare);
  if (frames.length === 0) {
    throw new Error(`video directory ${dir} contains no PNG frames`);
  }
  return frames.map((name) => join(dir, name));
}

/**
 * Load the k sampled frames of a video. A directory is read as numbered PNG
 * frames; a single PNG file is treated as a one-frame video.
 */
export function loadSampledFrames(path: string, k: number): RasterImage[] {
  let st;
  try {
    st = statSync(path);
  } catch (err) {
    throw new Error(`cannot access video ${path}: ${(err as Error).message}`);
  }
  const framePaths = st.isDirectory() ? listFrameFiles(path) : [path];
  const indices = sampleIndices(framePaths.length, k);
  const cache = new Map<number, RasterImage>();
  return indices.map((idx) => {
    let frame = cache.get(idx);
    if (frame === undefined) {
      frame = decodePng(framePaths[idx]);
      cache.set(idx, frame);
    }
    return frame;
  });
}
