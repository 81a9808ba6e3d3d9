/** Export per-frame embeddings for a manifest, in the kit's binary format. */

import * as tf from '@tensorflow/tfjs'
import {
  DEFAULT_BACKBONE,
  EMBEDDING_DIM,
  buildBackbone,
  embeddingModel,
  loadCheckpoint,
} from './backbone'
import { EmbeddingEntry, writeEmbeddings } from './format'
import { normalize, readPng, INPUT_SIZE } from './image'
import { loadManifest } from './manifest'

export interface BridgeConfig {
  backbone?: string
  checkpoint?: string
  batchSize?: number
  outPath: string
}

export interface ExportResult {
  dim: number
  count: number
}

export async function exportEmbeddings(
  manifestPath: string,
  config: BridgeConfig,
): Promise<ExportResult> {
  const records = loadManifest(manifestPath)
  const batchSize = config.batchSize ?? 32
  const model = config.checkpoint
    ? loadCheckpoint(config.checkpoint)
    : buildBackbone(config.backbone ?? DEFAULT_BACKBONE)
  const embedder = embeddingModel(model)
  const dim = embedder.outputs[0].shape[1] as number
  if (dim !== EMBEDDING_DIM) {
    throw new Error(`backbone embedding width ${dim} does not match declared ${EMBEDDING_DIM}`)
  }

  const entries: EmbeddingEntry[] = []
  const sorted = [...records].sort((a, b) => (a.videoId < b.videoId ? -1 : 1))
  for (const record of sorted) {
    for (let start = 0; start < record.frames.length; start += batchSize) {
      const paths = record.frames.slice(start, start + batchSize)
      const images = paths.map(readPng)
      const input = tf.tensor4d(normalize(images), [images.length, INPUT_SIZE, INPUT_SIZE, 3])
      const output = embedder.predict(input) as tf.Tensor
      const data = (await output.data()) as Float32Array
      input.dispose()
      output.dispose()
      for (let i = 0; i < images.length; i++) {
        entries.push({
          videoId: record.videoId,
          frameIndex: start + i,
          vector: data.slice(i * dim, (i + 1) * dim),
        })
      }
    }
  }
  writeEmbeddings(dim, entries, config.outPath)
  return { dim, count: entries.length }
}
