import { basename } from "node:path";

import { Embedder, ExtractorKind, EXTRACTOR_KINDS, l2Normalize, makeEmbedder, meanVector } from "./extractors.js";
import { EmbeddingFile, Role, SheetLayoutMeta, writeEmbeddingFile } from "./format.js";
import { RasterImage, resizeNearest } from "./image.js";
import { loadSampledFrames } from "./sampling.js";
import { buildSheet } from "./sheet.js";

export interface ExtractionJob {
  videoPaths: string[];
  extractor: ExtractorKind;
  framesPerVideo: number;
  sheetRows: number;
  sheetCols: number;
  frameSize: number;
  output: string;
  name: string;
  role: Role;
  weightsDir?: string;
}

export const JOB_DEFAULTS = {
  extractor: "sscd-sheet" as ExtractorKind,
  framesPerVideo: 16,
  sheetRows: 4,
  sheetCols: 4,
  frameSize: 224,
  role: "real" as Role,
};

function usesSheet(kind: ExtractorKind): boolean {
  return kind === "sscd-sheet" || kind === "raster-sheet";
}

export function checkJob(job: ExtractionJob): void {
  if (job.videoPaths.length === 0) {
    throw new RangeError("no input videos given");
  }
  if (!EXTRACTOR_KINDS.includes(job.extractor)) {
    throw new RangeError(`unknown extractor ${job.extractor}; choose one of ${EXTRACTOR_KINDS.join(", ")}`);
  }
  if (!Number.isInteger(job.framesPerVideo) || job.framesPerVideo < 1) {
    throw new RangeError(`frames per video must be a positive integer, got ${job.framesPerVideo}`);
  }
  if (!Number.isInteger(job.sheetRows) || job.sheetRows < 1 || !Number.isInteger(job.sheetCols) || job.sheetCols < 1) {
    throw new RangeError(`sheet layout must be positive, got ${job.sheetRows}x${job.sheetCols}`);
  }
  if (!Number.isInteger(job.frameSize) || job.frameSize < 1) {
    throw new RangeError(`frame size must be a positive integer, got ${job.frameSize}`);
  }
  if (usesSheet(job.extractor) && job.framesPerVideo > job.sheetRows * job.sheetCols) {
    throw new RangeError(
      `${job.framesPerVideo} frames per video do not fit a ${job.sheetRows}x${job.sheetCols} sheet`,
    );
  }
  if (job.role !== "real" && job.role !== "generated") {
    throw new RangeError(`role must be real or generated, got ${job.role}`);
  }
  if (job.name === "") {
    throw new RangeError("set name must be non-empty");
  }
}

export function videoId(path: string): string {
  const raw = basename(path.replace(/[/\\]+$/, ""));
  return raw.replace(/\.png$/i, "");
}

async function embedVideo(job: ExtractionJob, embedder: Embedder, frames: RasterImage[]): Promise<Float64Array> {
  if (embedder.kind === "sheet") {
    const sheet = buildSheet(frames, { rows: job.sheetRows, cols: job.sheetCols }, job.frameSize);
    return embedder.embed(sheet);
  }
  const resized = frames.map((f) => resizeNearest(f, job.frameSize, job.frameSize));
  if (embedder.kind === "clip") {
    return embedder.embed(resized);
  }
  const perFrame: Float64Array[] = [];
  for (const frame of resized) perFrame.push(await embedder.embed(frame));
  return l2Normalize(meanVector(perFrame));
}

/** Run one extraction job end to end and write the embedding file. */
export async function runExtraction(job: ExtractionJob): Promise<EmbeddingFile> {
  checkJob(job);
  const embedder = await makeEmbedder(job.extractor, job.weightsDir);

  const ids: string[] = [];
  const vectors: Float32Array[] = [];
  for (const path of job.videoPaths) {
    const id = videoId(path);
    if (ids.includes(id)) {
      throw new RangeError(`duplicate video id ${id}; input basenames must be unique`);
    }
    const frames = loadSampledFrames(path, job.framesPerVideo);
    const vec = await embedVideo(job, embedder, frames);
    ids.push(id);
    vectors.push(Float32Array.from(vec));
  }

  const sheetLayout: SheetLayoutMeta | null = usesSheet(job.extractor)
    ? { rows: job.sheetRows, cols: job.sheetCols, tile_size: job.frameSize }
    : null;
  const file: EmbeddingFile = {
    name: job.name,
    role: job.role,
    ids,
    vectors,
    extractor: embedder.tag,
    frameSampling: { frames_per_video: job.framesPerVideo, strategy: "uniform" },
    sheetLayout,
    sourcePaths: job.videoPaths.map(String),
  };
  writeEmbeddingFile(file, job.output);
  return file;
}
