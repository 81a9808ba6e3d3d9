import * as fs from 'fs'
import * as os from 'os'
import * as path from 'path'
import { RgbImage, writePng, INPUT_SIZE } from '../src/image'

/** Deterministic PRNG (mulberry32) for fixture generation. */
export function makeRng(seed: number): () => number {
  let a = seed >>> 0
  return () => {
    a |= 0
    a = (a + 0x6d2b79f5) | 0
    let t = Math.imul(a ^ (a >>> 15), 1 | a)
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296
  }
}

export function tempDir(prefix: string): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), prefix))
}

/** Uniform-noise face-crop stand-in around a base brightness. */
export function noiseImage(rand: () => number, base = 128, spread = 100): RgbImage {
  const data = new Uint8Array(INPUT_SIZE * INPUT_SIZE * 3)
  for (let i = 0; i < data.length; i++) {
    const v = base + (rand() - 0.5) * spread
    data[i] = Math.max(0, Math.min(255, Math.round(v)))
  }
  return { width: INPUT_SIZE, height: INPUT_SIZE, data }
}

export function writeImages(
  dir: string,
  count: number,
  rand: () => number,
  base: number,
  prefix = 'img',
): string[] {
  fs.mkdirSync(dir, { recursive: true })
  const out: string[] = []
  for (let i = 0; i < count; i++) {
    const p = path.join(dir, `${prefix}${String(i).padStart(3, '0')}.png`)
    writePng(noiseImage(rand, base), p)
    out.push(p)
  }
  return out
}

export function writeManifest(
  manifestPath: string,
  records: Array<{ videoId: string; frames: string[]; label?: string; split?: string }>,
): void {
  const lines = records.map((r) =>
    JSON.stringify({
      video_id: r.videoId,
      subject_id: `subj_${r.videoId}`,
      label: r.label ?? 'real',
      frames: r.frames,
      landmarks: `${r.videoId}.txt`,
      split: r.split ?? 'test',
    }),
  )
  fs.writeFileSync(manifestPath, lines.join('\n') + '\n')
}
