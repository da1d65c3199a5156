import { mkdirSync, mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, describe, expect, it } from "vitest";

import {
  l2Normalize,
  makeEmbedder,
  meanVector,
  rasterDescriptor,
  readGraphArtifacts,
  RASTER_SIDE,
} from "../src/extractors";
import { makeImage, setPixel } from "../src/image";

const tmpRoots: string[] = [];
function makeTmp(): string {
  const dir = mkdtempSync(join(tmpdir(), "embed-extract-"));
  tmpRoots.push(dir);
  return dir;
}
afterAll(() => {
  for (const dir of tmpRoots) rmSync(dir, { recursive: true, force: true });
});

function norm(v: Float64Array): number {
  let s = 0;
  for (const x of v) s += x * x;
  return Math.sqrt(s);
}

function patterned(seedOffset: number) {
  const img = makeImage(32, 32);
  for (let r = 0; r < 32; r++) {
    for (let c = 0; c < 32; c++) {
      setPixel(img, r, c, [(r * 5 + c * 3 + seedOffset) % 256, (r * 11) % 256, (c * 13 + seedOffset) % 256]);
    }
  }
  return img;
}

describe("vector helpers", () => {
  it("l2Normalize yields unit norm and preserves direction", () => {
    const v = l2Normalize(Float64Array.from([3, 4]));
    expect(v[0]).toBeCloseTo(0.6, 12);
    expect(v[1]).toBeCloseTo(0.8, 12);
    expect(norm(v)).toBeCloseTo(1, 12);
  });

  it("l2Normalize maps the zero vector to a fixed unit vector", () => {
    const v = l2Normalize(new Float64Array(4));
    expect(norm(v)).toBeCloseTo(1, 12);
    expect(v[0]).toBeCloseTo(0.5, 12);
  });

  it("meanVector averages componentwise", () => {
    const m = meanVector([Float64Array.from([1, 3]), Float64Array.from([3, 5])]);
    expect(Array.from(m)).toEqual([2, 4]);
  });
});

describe("rasterDescriptor", () => {
  it("has unit norm and fixed dimensionality", () => {
    const d = rasterDescriptor(patterned(0));
    expect(d.length).toBe(RASTER_SIDE * RASTER_SIDE * 3);
    expect(norm(d)).toBeCloseTo(1, 10);
  });

  it("is bit-stable across repeated calls on the same image", () => {
    const img = patterned(3);
    const a = rasterDescriptor(img);
    const b = rasterDescriptor(img);
    expect(Array.from(a)).toEqual(Array.from(b));
  });

  it("matches on identical images and differs on different ones", () => {
    const a = rasterDescriptor(patterned(1));
    const b = rasterDescriptor(patterned(1));
    const c = rasterDescriptor(patterned(90));
    expect(Array.from(a)).toEqual(Array.from(b));
    expect(Array.from(a)).not.toEqual(Array.from(c));
  });

  it("stays well defined on a solid-colour image", () => {
    const d = rasterDescriptor(makeImage(8, 8, 77));
    expect(norm(d)).toBeCloseTo(1, 10);
  });
});

describe("readGraphArtifacts", () => {
  it("flattens weight specs and concatenates shards in manifest order", () => {
    const dir = makeTmp();
    writeFileSync(
      join(dir, "model.json"),
      JSON.stringify({
        modelTopology: { node: [] },
        weightsManifest: [
          { paths: ["g1-shard1.bin", "g1-shard2.bin"], weights: [{ name: "w1", shape: [2], dtype: "float32" }] },
          { paths: ["g2-shard1.bin"], weights: [{ name: "w2", shape: [1], dtype: "float32" }] },
        ],
      }),
    );
    writeFileSync(join(dir, "g1-shard1.bin"), Buffer.from([1, 2, 3]));
    writeFileSync(join(dir, "g1-shard2.bin"), Buffer.from([4, 5]));
    writeFileSync(join(dir, "g2-shard1.bin"), Buffer.from([6]));

    const artifacts = readGraphArtifacts(dir);
    expect((artifacts.weightSpecs as { name: string }[]).map((w) => w.name)).toEqual(["w1", "w2"]);
    expect(Array.from(new Uint8Array(artifacts.weightData))).toEqual([1, 2, 3, 4, 5, 6]);
    expect(artifacts.modelTopology).toEqual({ node: [] });
  });

  it("rejects a directory without model.json", () => {
    const dir = makeTmp();
    mkdirSync(join(dir, "empty"));
    expect(() => readGraphArtifacts(join(dir, "empty"))).toThrow(/model\.json/);
  });
});

describe("makeEmbedder", () => {
  it("provides raster embedders without any weights", async () => {
    const sheet = await makeEmbedder("raster-sheet");
    expect(sheet.kind).toBe("sheet");
    expect(sheet.tag).toBe("raster-sheet");
    const frame = await makeEmbedder("raster-frame-mean");
    expect(frame.kind).toBe("frame-mean");
  });

  it("refuses model-backed extractors without a weights directory", async () => {
    for (const kind of ["sscd-sheet", "sscd-frame-mean", "i3d"] as const) {
      await expect(makeEmbedder(kind)).rejects.toThrow(/weights/);
    }
  });

  it("names the missing model.json when the weights directory is empty", async () => {
    const dir = makeTmp();
    await expect(makeEmbedder("sscd-sheet", dir)).rejects.toThrow(/model\.json/);
  });
});
