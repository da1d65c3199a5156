import { createHash } from "node:crypto";
import { readFileSync, writeFileSync } from "node:fs";

/**
 * Binary descriptor-set file, little-endian throughout:
 *
 *   magic   4 bytes  "REPA"
 *   version u32      currently 1
 *   count   u32      number of vectors
 *   dim     u32      vector dimensionality
 *   dtype   u8       0 = float32 little-endian
 *   payload count * dim * 4 bytes, row-major float32
 *   digest  32 bytes SHA-256 of the payload bytes only
 *
 * A JSON manifest sidecar sits next to the binary as
 * `<filename>.manifest.json` and repeats the payload checksum in hex.
 */
export const MAGIC = "REPA";
export const FORMAT_VERSION = 1;
export const DTYPE_F32LE = 0;
export const HEADER_SIZE = 17;
export const DIGEST_SIZE = 32;

export type Role = "real" | "generated";

export interface FrameSampling {
  frames_per_video: number;
  strategy: string;
}

export interface SheetLayoutMeta {
  rows: number;
  cols: number;
  tile_size: number;
}

export interface EmbeddingFile {
  name: string;
  role: Role;
  ids: string[];
  vectors: Float32Array[];
  extractor: string;
  frameSampling: FrameSampling;
  sheetLayout: SheetLayoutMeta | null;
  sourcePaths: string[];
}

export function sidecarPath(path: string): string {
  return `${path}.manifest.json`;
}

function sortKeysDeep(value: unknown): unknown {
  if (Array.isArray(value)) return value.map(sortKeysDeep);
  if (value !== null && typeof value === "object") {
    const src = value as Record<string, unknown>;
    const out: Record<string, unknown> = {};
    for (const key of Object.keys(src).sort()) out[key] = sortKeysDeep(src[key]);
    return out;
  }
  return value;
}

function checkVectors(name: string, ids: string[], vectors: Float32Array[]): number {
  if (vectors.length === 0) {
    throw new RangeError(`set ${name}: refusing to write a set with no vectors`);
  }
  const dim = vectors[0].length;
  if (dim < 1) {
    throw new RangeError(`set ${name}: descriptor dimension must be positive`);
  }
  for (const row of vectors) {
    if (row.length !== dim) {
      throw new RangeError(`set ${name}: ragged vectors (${row.length} vs ${dim})`);
    }
    for (const v of row) {
      if (!Number.isFinite(v)) {
        throw new RangeError(`set ${name}: descriptors contain non-finite values`);
      }
    }
  }
  if (ids.length !== vectors.length) {
    throw new RangeError(`set ${name}: ${ids.length} ids for ${vectors.length} vectors`);
  }
  if (new Set(ids).size !== ids.length) {
    throw new RangeError(`set ${name}: video ids must be unique`);
  }
  for (const id of ids) {
    if (id === "") throw new RangeError(`set ${name}: empty video id`);
  }
  return dim;
}

export function encodePayload(vectors: Float32Array[], dim: number): Buffer {
  const payload = Buffer.alloc(vectors.length * dim * 4);
  const view = new DataView(payload.buffer, payload.byteOffset, payload.byteLength);
  let off = 0;
  for (const row of vectors) {
    for (let j = 0; j < dim; j++) {
      view.setFloat32(off, row[j], true);
      off += 4;
    }
  }
  return payload;
}

export function writeEmbeddingFile(file: EmbeddingFile, path: string): void {
  const dim = checkVectors(file.name, file.ids, file.vectors);
  const payload = encodePayload(file.vectors, dim);
  const digest = createHash("sha256").update(payload).digest();

  const header = Buffer.alloc(HEADER_SIZE);
  header.write(MAGIC, 0, "ascii");
  header.writeUInt32LE(FORMAT_VERSION, 4);
  header.writeUInt32LE(file.vectors.length, 8);
  header.writeUInt32LE(dim, 12);
  header.writeUInt8(DTYPE_F32LE, 16);

  const sidecar = sortKeysDeep({
    name: file.name,
    role: file.role,
    ids: file.ids,
    extractor: file.extractor,
    frame_sampling: file.frameSampling,
    sheet_layout: file.sheetLayout,
    source_paths: file.sourcePaths,
    checksum: digest.toString("hex"),
    format_version: FORMAT_VERSION,
  });

  writeFileSync(path, Buffer.concat([header, payload, digest]));
  writeFileSync(sidecarPath(path), JSON.stringify(sidecar, null, 2) + "\n");
}

/** Read back an embedding file, verifying structure and checksums. */
export function readEmbeddingFile(path: string): EmbeddingFile {
  const blob = readFileSync(path);
  if (blob.length < HEADER_SIZE) {
    throw new Error(`${path}: file shorter than the ${HEADER_SIZE}-byte header`);
  }
  const magic = blob.toString("ascii", 0, 4);
  if (magic !== MAGIC) {
    throw new Error(`${path}: bad magic ${JSON.stringify(magic)}, expected ${MAGIC}`);
  }
  const version = blob.readUInt32LE(4);
  if (version !== FORMAT_VERSION) {
    throw new Error(`${path}: format version ${version}, this reader supports ${FORMAT_VERSION}`);
  }
  const count = blob.readUInt32LE(8);
  const dim = blob.readUInt32LE(12);
  const dtype = blob.readUInt8(16);
  if (dtype !== DTYPE_F32LE) {
    throw new Error(`${path}: dtype code ${dtype}, only 0 (f32le) is supported`);
  }
  const payloadLen = count * dim * 4;
  const expectedLen = HEADER_SIZE + payloadLen + DIGEST_SIZE;
  if (blob.length < expectedLen) {
    throw new Error(`${path}: expected ${expectedLen} bytes for ${count}x${dim} payload plus digest, got ${blob.length}`);
  }
  const payload = blob.subarray(HEADER_SIZE, HEADER_SIZE + payloadLen);
  const stored = blob.subarray(HEADER_SIZE + payloadLen, expectedLen);
  const actual = createHash("sha256").update(payload).digest();
  if (!stored.equals(actual)) {
    throw new Error(`${path}: payload checksum mismatch`);
  }

  const view = new DataView(payload.buffer, payload.byteOffset, payload.byteLength);
  const vectors: Float32Array[] = [];
  for (let i = 0; i < count; i++) {
    const row = new Float32Array(dim);
    for (let j = 0; j < dim; j++) row[j] = view.getFloat32((i * dim + j) * 4, true);
    vectors.push(row);
  }

  const scPath = sidecarPath(path);
  let meta: Record<string, unknown>;
  try {
    meta = JSON.parse(readFileSync(scPath, "utf-8"));
  } catch (err) {
    throw new Error(`${path}: cannot read manifest sidecar ${scPath}: ${(err as Error).message}`);
  }
  if (meta["checksum"] !== actual.toString("hex")) {
    throw new Error(`${scPath}: manifest checksum does not match payload`);
  }
  return {
    name: String(meta["name"] ?? ""),
    role: meta["role"] as Role,
    ids: (meta["ids"] as string[]) ?? [],
    vectors,
    extractor: String(meta["extractor"] ?? "unknown"),
    frameSampling: meta["frame_sampling"] as FrameSampling,
    sheetLayout: (meta["sheet_layout"] as SheetLayoutMeta | null) ?? null,
    sourcePaths: (meta["source_paths"] as string[]) ?? [],
  };
}
