/**
 * Binary embedding file interchange, bit-compatible with the Python kit.
 *
 * Layout (little-endian):
 *   magic "DEMB" | u32 version | u32 dim | u32 count
 *   per entry: u32 id-length | utf-8 video id | u32 frame index | dim * f32
 * Entries are sorted by (videoId, frameIndex).
 */

import * as fs from 'fs'

export const EMBEDDING_MAGIC = 'DEMB'
export const EMBEDDING_VERSION = 1

export interface EmbeddingEntry {
  videoId: string
  frameIndex: number
  vector: Float32Array
}

export class EmbeddingFormatError extends Error {}

function compareEntries(a: EmbeddingEntry, b: EmbeddingEntry): number {
  if (a.videoId !== b.videoId) return a.videoId < b.videoId ? -1 : 1
  return a.frameIndex - b.frameIndex
}

export function writeEmbeddings(dim: number, entries: EmbeddingEntry[], path: string): void {
  if (!Number.isInteger(dim) || dim <= 0) {
    throw new EmbeddingFormatError(`dim must be a positive integer, got ${dim}`)
  }
  const sorted = [...entries].sort(compareEntries)
  const chunks: Buffer[] = []
  const header = Buffer.alloc(16)
  header.write(EMBEDDING_MAGIC, 0, 'ascii')
  header.writeUInt32LE(EMBEDDING_VERSION, 4)
  header.writeUInt32LE(dim, 8)
  header.writeUInt32LE(sorted.length, 12)
  chunks.push(header)
  for (const entry of sorted) {
    if (entry.vector.length !== dim) {
      throw new EmbeddingFormatError(
        `embedding for ('${entry.videoId}', ${entry.frameIndex}) has length ` +
          `${entry.vector.length}, expected ${dim}`,
      )
    }
    for (const v of entry.vector) {
      if (!Number.isFinite(v)) {
        throw new EmbeddingFormatError(
          `non-finite embedding for ('${entry.videoId}', ${entry.frameIndex})`,
        )
      }
    }
    const id = Buffer.from(entry.videoId, 'utf-8')
    const meta = Buffer.alloc(4 + id.length + 4)
    meta.writeUInt32LE(id.length, 0)
    id.copy(meta, 4)
    meta.writeUInt32LE(entry.frameIndex, 4 + id.length)
    chunks.push(meta)
    const payload = Buffer.alloc(4 * dim)
    for (let i = 0; i < dim; i++) payload.writeFloatLE(entry.vector[i], 4 * i)
    chunks.push(payload)
  }
  fs.writeFileSync(path, Buffer.concat(chunks))
}

export function readEmbeddings(path: string): { dim: number; entries: EmbeddingEntry[] } {
  const buf = fs.readFileSync(path)
  if (buf.length < 16) throw new EmbeddingFormatError('truncated embedding file header')
  const magic = buf.toString('ascii', 0, 4)
  if (magic !== EMBEDDING_MAGIC) {
    throw new EmbeddingFormatError(`magic number mismatch: ${JSON.stringify(magic)}`)
  }
  const version = buf.readUInt32LE(4)
  if (version !== EMBEDDING_VERSION) {
    throw new EmbeddingFormatError(`unsupported embedding file version ${version}`)
  }
  const dim = buf.readUInt32LE(8)
  if (dim <= 0) throw new EmbeddingFormatError(`invalid dim ${dim} in header`)
  const count = buf.readUInt32LE(12)
  const entries: EmbeddingEntry[] = []
  let offset = 16
  for (let n = 0; n < count; n++) {
    if (offset + 4 > buf.length) throw new EmbeddingFormatError('truncated entry key')
    const idLen = buf.readUInt32LE(offset)
    offset += 4
    if (offset + idLen + 4 > buf.length) throw new EmbeddingFormatError('truncated entry key')
    const videoId = buf.toString('utf-8', offset, offset + idLen)
    offset += idLen
    const frameIndex = buf.readUInt32LE(offset)
    offset += 4
    if (offset + 4 * dim > buf.length) throw new EmbeddingFormatError('truncated vector payload')
    const vector = new Float32Array(dim)
    for (let i = 0; i < dim; i++) vector[i] = buf.readFloatLE(offset + 4 * i)
    offset += 4 * dim
    entries.push({ videoId, frameIndex, vector })
  }
  if (offset !== buf.length) throw new EmbeddingFormatError('trailing data after last entry')
  return { dim, entries }
}
