export { RasterImage, decodePng, encodePng, makeImage, getPixel, setPixel, resizeNearest } from "./image.js";
export { sampleIndices, listFrameFiles, loadSampledFrames } from "./sampling.js";
export { SheetLayout, buildSheet } from "./sheet.js";
export {
  EmbeddingFile,
  FrameSampling,
  Role,
  SheetLayoutMeta,
  FORMAT_VERSION,
  HEADER_SIZE,
  DIGEST_SIZE,
  MAGIC,
  readEmbeddingFile,
  sidecarPath,
  writeEmbeddingFile,
} from "./format.js";
export {
  Embedder,
  ExtractorKind,
  EXTRACTOR_KINDS,
  GraphArtifacts,
  RASTER_SIDE,
  l2Normalize,
  makeEmbedder,
  meanVector,
  rasterDescriptor,
  readGraphArtifacts,
} from "./extractors.js";
export { ExtractionJob, JOB_DEFAULTS, checkJob, runExtraction, videoId } from "./job.js";
