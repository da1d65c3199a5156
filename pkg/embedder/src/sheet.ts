import { RasterImage, makeImage, resizeNearest } from "./image.js";

export interface SheetLayout {
  rows: number;
  cols: number;
}

/**
 * Tile frames onto one square-celled contact sheet, row-major. Frame t goes to
 * grid cell (floor(t / cols), t mod cols); its pixel (r, c) lands at sheet
 * position (i * tileSize + r, j * tileSize + c). Unused cells stay black.
 */
export function buildSheet(frames: RasterImage[], layout: SheetLayout, tileSize: number): RasterImage {
  const { rows, cols } = layout;
  if (!Number.isInteger(rows) || rows < 1 || !Number.isInteger(cols) || cols < 1) {
    throw new RangeError(`sheet layout must have positive rows and cols, got ${rows}x${cols}`);
  }
  if (!Number.isInteger(tileSize) || tileSize < 1) {
    throw new RangeError(`tile size must be a positive integer, got ${tileSize}`);
  }
  if (frames.length === 0) {
    throw new RangeError("cannot build a sheet from zero frames");
  }
  if (frames.length > rows * cols) {
    throw new RangeError(`${frames.length} frames do not fit a ${rows}x${cols} sheet`);
  }
  const sheet = makeImage(cols * tileSize, rows * tileSize);
  for (let t = 0; t < frames.length; t++) {
    const tile = resizeNearest(frames[t], tileSize, tileSize);
    const i = Math.floor(t / cols);
    const j = t % cols;
    for (let r = 0; r < tileSize; r++) {
      const src = r * tileSize * 3;
      const dst = ((i * tileSize + r) * sheet.width + j * tileSize) * 3;
      sheet.pixels.set(tile.pixels.subarray(src, src + tileSize * 3), dst);
    }
  }
  return sheet;
}
