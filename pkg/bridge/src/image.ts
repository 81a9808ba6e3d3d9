/** PNG loading and the mean-0.5/std-0.5 input normalization. */

import * as fs from 'fs'
import { PNG } from 'pngjs'

export const INPUT_SIZE = 224

export interface RgbImage {
  width: number
  height: number
  /** RGB interleaved, length width * height * 3 */
  data: Uint8Array
}

export function readPng(path: string): RgbImage {
  const png = PNG.sync.read(fs.readFileSync(path))
  const data = new Uint8Array(png.width * png.height * 3)
  for (let p = 0; p < png.width * png.height; p++) {
    data[p * 3] = png.data[p * 4]
    data[p * 3 + 1] = png.data[p * 4 + 1]
    data[p * 3 + 2] = png.data[p * 4 + 2]
  }
  return { width: png.width, height: png.height, data }
}

export function writePng(image: RgbImage, path: string): void {
  const png = new PNG({ width: image.width, height: image.height })
  for (let p = 0; p < image.width * image.height; p++) {
    png.data[p * 4] = image.data[p * 3]
    png.data[p * 4 + 1] = image.data[p * 3 + 1]
    png.data[p * 4 + 2] = image.data[p * 3 + 2]
    png.data[p * 4 + 3] = 255
  }
  fs.writeFileSync(path, PNG.sync.write(png))
}

/** Map [0, 255] pixels to [-1, 1] floats: (p / 255 - 0.5) / 0.5. */
export function normalize(images: RgbImage[]): Float32Array {
  const per = INPUT_SIZE * INPUT_SIZE * 3
  const out = new Float32Array(images.length * per)
  images.forEach((img, n) => {
    if (img.width !== INPUT_SIZE || img.height !== INPUT_SIZE) {
      throw new Error(
        `expected ${INPUT_SIZE}x${INPUT_SIZE} input, got ${img.width}x${img.height}`,
      )
    }
    const base = n * per
    for (let i = 0; i < per; i++) out[base + i] = (img.data[i] / 255 - 0.5) / 0.5
  })
  return out
}
