/** Decode PNG/JPEG files to RGB float arrays. */

import { readFileSync } from 'node:fs';
import { PNG } from 'pngjs';
import jpeg from 'jpeg-js';

export interface DecodedImage {
  data: Float32Array; // HxWx3 row-major, values in [0, 255]
  height: number;
  width: number;
}

function rgbaToRgb(rgba: Uint8Array, width: number, height: number): DecodedImage {
  const out = new Float32Array(width * height * 3);
  for (let p = 0; p < width * height; p++) {
    out[p * 3] = rgba[p * 4];
    out[p * 3 + 1] = rgba[p * 4 + 1];
    out[p * 3 + 2] = rgba[p * 4 + 2];
  }
  return { data: out, height, width };
}

export function decodeImageFile(path: string): DecodedImage {
  const raw = readFileSync(path);
  if (raw.length >= 8 && raw[0] === 0x89 && raw[1] === 0x50) {
    const png = PNG.sync.read(raw);
    return rgbaToRgb(png.data, png.width, png.height);
  }
  if (raw.length >= 2 && raw[0] === 0xff && raw[1] === 0xd8) {
    const img = jpeg.decode(raw, { useTArray: true, maxMemoryUsageInMB: 512 });
    return rgbaToRgb(img.data, img.width, img.height);
  }
  throw new Error(`${path}: not a PNG or JPEG file`);
}

export const IMAGE_EXTENSIONS = new Set(['.png', '.jpg', '.jpeg']);
