import { readFileSync, writeFileSync } from "node:fs";
import { PNG } from "pngjs";

/** In-memory image: row-major RGB, three bytes per pixel. */
export interface RasterImage {
  width: number;
  height: number;
  pixels: Uint8Array;
}

export function makeImage(width: number, height: number, fill = 0): RasterImage {
  if (width < 1 || height < 1) {
    throw new RangeError(`image dimensions must be positive, got ${width}x${height}`);
  }
  const pixels = new Uint8Array(width * height * 3);
  if (fill !== 0) pixels.fill(fill);
  return { width, height, pixels };
}

export function getPixel(img: RasterImage, row: number, col: number): [number, number, number] {
  const base = (row * img.width + col) * 3;
  return [img.pixels[base], img.pixels[base + 1], img.pixels[base + 2]];
}

export function setPixel(img: RasterImage, row: number, col: number, rgb: [number, number, number]): void {
  const base = (row * img.width + col) * 3;
  img.pixels[base] = rgb[0];
  img.pixels[base + 1] = rgb[1];
  img.pixels[base + 2] = rgb[2];
}

export function decodePng(path: string): RasterImage {
  let buf: Buffer;
  try {
    buf = readFileSync(path);
  } catch (err) {
    throw new Error(`cannot read image file ${path}: ${(err as Error).message}`);
  }
  let png: PNG;
  try {
    png = PNG.sync.read(buf);
  } catch (err) {
    throw new Error(`cannot decode PNG ${path}: ${(err as Error).message}`);
  }
  const { width, height, data } = png;
  const pixels = new Uint8Array(width * height * 3);
  for (let i = 0; i < width * height; i++) {
    pixels[i * 3] = data[i * 4];
    pixels[i * 3 + 1] = data[i * 4 + 1];
    pixels[i * 3 + 2] = data[i * 4 + 2];
  }
  return { width, height, pixels };
}

export function encodePng(img: RasterImage, path: string): void {
  const png = new PNG({ width: img.width, height: img.height });
  for (let i = 0; i < img.width * img.height; i++) {
    png.data[i * 4] = img.pixels[i * 3];
    png.data[i * 4 + 1] = img.pixels[i * 3 + 1];
    png.data[i * 4 + 2] = img.pixels[i * 3 + 2];
    png.data[i * 4 + 3] = 255;
  }
  writeFileSync(path, PNG.sync.write(png));
}

/**
 * Nearest-neighbour resize. Source index for output index i along an axis is
 * floor(i * srcSize / outSize), so equal-sized axes copy through unchanged.
 */
export function resizeNearest(img: RasterImage, outWidth: number, outHeight: number): RasterImage {
  if (outWidth < 1 || outHeight < 1) {
    throw new RangeError(`resize target must be positive, got ${outWidth}x${outHeight}`);
  }
  if (outWidth === img.width && outHeight === img.height) {
    return { width: img.width, height: img.height, pixels: img.pixels.slice() };
  }
  const out = makeImage(outWidth, outHeight);
  const colMap = new Int32Array(outWidth);
  for (let c = 0; c < outWidth; c++) colMap[c] = Math.floor((c * img.width) / outWidth);
  for (let r = 0; r < outHeight; r++) {
    const srcRow = Math.floor((r * img.height) / outHeight);
    const srcBase = srcRow * img.width;
    const dstBase = r * outWidth;
    for (let c = 0; c < outWidth; c++) {
      const s = (srcBase + colMap[c]) * 3;
      const d = (dstBase + c) * 3;
      out.pixels[d] = img.pixels[s];
      out.pixels[d + 1] = img.pixels[s + 1];
      out.pixels[d + 2] = img.pixels[s + 2];
    }
  }
  return out;
}
