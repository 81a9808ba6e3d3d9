/**
 * The feature-extraction backbone and its weight checkpoints.
 *
 * The default `toy-1792` network is a deterministic, seed-initialized CNN
 * whose penultimate layer is 1792 wide, matching the embedding width the
 * rest of the kit expects from the full-scale backbone. Paper-scale
 * training (SAM optimizer, 100 epochs, batch 32, lr 0.001 with linear
 * decay from epoch 75) is documented as the `paper-scale` preset below but
 * is not a desk-scale target; the tested path is toy-scale fine-tuning.
 *
 * The classifier head is zero-initialized so an untrained model predicts
 * exactly 0.5 and balanced binary cross-entropy starts at ln 2.
 */

import * as tf from '@tensorflow/tfjs'
import * as fs from 'fs'

export const DEFAULT_BACKBONE = 'toy-1792'
export const EMBEDDING_DIM = 1792
export const EMBEDDING_LAYER = 'embedding'

const CHECKPOINT_MAGIC = 'BCKP'
const CHECKPOINT_VERSION = 1

/** Documented presets; only the toy preset is exercised at desk scale. */
export const TRAINING_PRESETS = {
  'toy-scale': { epochs: 2, batchSize: 16, learningRate: 1e-3 },
  'paper-scale': { epochs: 100, batchSize: 32, learningRate: 1e-3, lrDecayFromEpoch: 75 },
} as const

export class CheckpointError extends Error {}

export function buildBackbone(name: string = DEFAULT_BACKBONE, seed = 0): tf.LayersModel {
  if (name !== DEFAULT_BACKBONE) {
    throw new Error(`unknown backbone '${name}' (available: ${DEFAULT_BACKBONE})`)
  }
  const input = tf.input({ shape: [224, 224, 3] })
  let x = tf.layers
    .avgPooling2d({ poolSize: 8, strides: 8 })
    .apply(input) as tf.SymbolicTensor
  x = tf.layers
    .conv2d({
      filters: 16,
      kernelSize: 3,
      strides: 2,
      activation: 'relu',
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 1 }),
      biasInitializer: 'zeros',
      name: 'conv',
    })
    .apply(x) as tf.SymbolicTensor
  x = tf.layers.avgPooling2d({ poolSize: 2, strides: 2 }).apply(x) as tf.SymbolicTensor
  x = tf.layers.flatten().apply(x) as tf.SymbolicTensor
  x = tf.layers
    .dense({
      units: EMBEDDING_DIM,
      activation: 'tanh',
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 2 }),
      biasInitializer: 'zeros',
      name: EMBEDDING_LAYER,
    })
    .apply(x) as tf.SymbolicTensor
  const out = tf.layers
    .dense({
      units: 1,
      activation: 'sigmoid',
      kernelInitializer: 'zeros',
      biasInitializer: 'zeros',
      name: 'classifier',
    })
    .apply(x) as tf.SymbolicTensor
  return tf.model({ inputs: input, outputs: out, name: name })
}

/** The backbone with its classification head dropped: images -> embeddings. */
export function embeddingModel(model: tf.LayersModel): tf.LayersModel {
  const layer = model.getLayer(EMBEDDING_LAYER)
  return tf.model({ inputs: model.inputs, outputs: layer.output as tf.SymbolicTensor })
}

export async function saveCheckpoint(model: tf.LayersModel, path: string): Promise<void> {
  const weights = model.getWeights()
  const specs = model.weights.map((w, i) => ({ name: w.name, shape: weights[i].shape }))
  const headerJson = Buffer.from(
    JSON.stringify({ backbone: model.name, weights: specs }),
    'utf-8',
  )
  const chunks: Buffer[] = []
  const head = Buffer.alloc(12)
  head.write(CHECKPOINT_MAGIC, 0, 'ascii')
  head.writeUInt32LE(CHECKPOINT_VERSION, 4)
  head.writeUInt32LE(headerJson.length, 8)
  chunks.push(head, headerJson)
  for (const w of weights) {
    const data = (await w.data()) as Float32Array
    const buf = Buffer.alloc(4 * data.length)
    for (let i = 0; i < data.length; i++) buf.writeFloatLE(data[i], 4 * i)
    chunks.push(buf)
  }
  fs.writeFileSync(path, Buffer.concat(chunks))
}

export function loadCheckpoint(path: string): tf.LayersModel {
  const buf = fs.readFileSync(path)
  if (buf.length < 12 || buf.toString('ascii', 0, 4) !== CHECKPOINT_MAGIC) {
    throw new CheckpointError('not a bridge checkpoint file')
  }
  if (buf.readUInt32LE(4) !== CHECKPOINT_VERSION) {
    throw new CheckpointError(`unsupported checkpoint version ${buf.readUInt32LE(4)}`)
  }
  const jsonLen = buf.readUInt32LE(8)
  const header = JSON.parse(buf.toString('utf-8', 12, 12 + jsonLen))
  const model = buildBackbone(header.backbone)
  let offset = 12 + jsonLen
  const tensors: tf.Tensor[] = []
  for (const spec of header.weights) {
    const size = (spec.shape as number[]).reduce((a: number, b: number) => a * b, 1)
    if (offset + 4 * size > buf.length) throw new CheckpointError('truncated checkpoint payload')
    const data = new Float32Array(size)
    for (let i = 0; i < size; i++) data[i] = buf.readFloatLE(offset + 4 * i)
    offset += 4 * size
    tensors.push(tf.tensor(data, spec.shape))
  }
  if (offset !== buf.length) throw new CheckpointError('trailing data in checkpoint')
  model.setWeights(tensors)
  tensors.forEach((t) => t.dispose())
  return model
}

/** Flattened weight bytes, for bit-exact comparisons in tests. */
export async function weightBytes(model: tf.LayersModel): Promise<Buffer> {
  const parts: Buffer[] = []
  for (const w of model.getWeights()) {
    const data = (await w.data()) as Float32Array
    parts.push(Buffer.from(data.buffer.slice(data.byteOffset, data.byteOffset + data.byteLength)))
  }
  return Buffer.concat(parts)
}
