/**
 * Toy-scale fine-tuning of the backbone on real images and synthesized
 * pseudo-deepfakes with binary cross-entropy (label 0 = real image,
 * 1 = pseudo-deepfake).
 *
 * The corpus never includes actual fake media: only reals and the
 * synthesizer's outputs enter training. A held-out slice is scored after
 * every epoch with the real-vs-pseudo AUC, and the weights of the best
 * epoch are the ones returned (fake-free model selection).
 */

import * as tf from '@tensorflow/tfjs'
import { buildBackbone, DEFAULT_BACKBONE } from './backbone'
import { normalize, readPng, INPUT_SIZE } from './image'
import { auc } from './metrics'

export interface FinetuneOptions {
  epochs: number
  learningRate?: number
  batchSize?: number
  seed?: number
  valFraction?: number
  backbone?: string
}

export interface EpochStats {
  epoch: number
  meanLoss: number
  valAuc: number
}

export interface FinetuneResult {
  model: tf.LayersModel
  history: EpochStats[]
  bestEpoch: number
  bestValAuc: number
}

export class DivergenceError extends Error {}

/** Deterministic PRNG for shuffles (mulberry32). */
function makeRng(seed: number): () => number {
  let a = seed >>> 0
  return () => {
    a |= 0
    a = (a + 0x6d2b79f5) | 0
    let t = Math.imul(a ^ (a >>> 15), 1 | a)
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296
  }
}

function shuffled<T>(items: T[], rand: () => number): T[] {
  const out = [...items]
  for (let i = out.length - 1; i > 0; i--) {
    const j = Math.floor(rand() * (i + 1))
    ;[out[i], out[j]] = [out[j], out[i]]
  }
  return out
}

function loadBatch(paths: string[]): tf.Tensor4D {
  const images = paths.map(readPng)
  return tf.tensor4d(normalize(images), [images.length, INPUT_SIZE, INPUT_SIZE, 3])
}

/** Mean binary cross-entropy of the model on labeled images. */
export function evaluateBce(
  model: tf.LayersModel,
  paths: string[],
  labels: number[],
  batchSize = 32,
): number {
  let total = 0
  for (let start = 0; start < paths.length; start += batchSize) {
    const batchPaths = paths.slice(start, start + batchSize)
    const batchLabels = labels.slice(start, start + batchSize)
    const value = tf.tidy(() => {
      const xs = loadBatch(batchPaths)
      const ys = tf.tensor2d(batchLabels, [batchLabels.length, 1])
      const preds = model.apply(xs, { training: false }) as tf.Tensor
      return tf.metrics.binaryCrossentropy(ys, preds).mean()
    })
    total += (value.dataSync() as Float32Array)[0] * batchPaths.length
    value.dispose()
  }
  return total / paths.length
}

function predictScores(model: tf.LayersModel, paths: string[], batchSize = 32): number[] {
  const scores: number[] = []
  for (let start = 0; start < paths.length; start += batchSize) {
    const out = tf.tidy(() => {
      const xs = loadBatch(paths.slice(start, start + batchSize))
      return (model.apply(xs, { training: false }) as tf.Tensor).flatten()
    })
    scores.push(...(out.dataSync() as Float32Array))
    out.dispose()
  }
  return scores
}

export async function finetuneOnPseudofakes(
  realPaths: string[],
  pseudoPaths: string[],
  options: FinetuneOptions,
): Promise<FinetuneResult> {
  if (realPaths.length === 0 || pseudoPaths.length === 0) {
    throw new Error('both the real and the pseudo-deepfake class must be non-empty')
  }
  const { epochs } = options
  const learningRate = options.learningRate ?? 1e-3
  const batchSize = options.batchSize ?? 16
  const seed = options.seed ?? 0
  const valFraction = options.valFraction ?? 0.25

  const rand = makeRng(seed * 2654435761 + 1)
  const samples = shuffled(
    [
      ...realPaths.map((p) => ({ path: p, label: 0 })),
      ...pseudoPaths.map((p) => ({ path: p, label: 1 })),
    ],
    rand,
  )
  const nVal = Math.max(2, Math.floor(samples.length * valFraction))
  const val = samples.slice(0, nVal)
  const train = samples.slice(nVal)
  if (!val.some((s) => s.label === 0) || !val.some((s) => s.label === 1)) {
    throw new Error('validation slice lost a class; provide more images')
  }

  const model = buildBackbone(options.backbone ?? DEFAULT_BACKBONE, seed)
  const optimizer = tf.train.adam(learningRate)
  const history: EpochStats[] = []
  const valPaths = val.map((s) => s.path)
  const valLabels = val.map((s) => s.label)

  // the initialized model is a selectable checkpoint too
  let bestEpoch = 0
  let bestValAuc = auc(predictScores(model, valPaths), valLabels)
  let bestWeights: tf.Tensor[] = model.getWeights().map((w) => w.clone())

  for (let epoch = 1; epoch <= epochs; epoch++) {
    const order = shuffled(train, rand)
    let lossSum = 0
    let seen = 0
    for (let start = 0; start < order.length; start += batchSize) {
      const batch = order.slice(start, start + batchSize)
      const xs = loadBatch(batch.map((s) => s.path))
      const ys = tf.tensor2d(batch.map((s) => s.label), [batch.length, 1])
      const lossTensor = optimizer.minimize(
        () => {
          const preds = model.apply(xs, { training: true }) as tf.Tensor
          return tf.metrics.binaryCrossentropy(ys, preds).mean() as tf.Scalar
        },
        true,
      ) as tf.Scalar
      const lossValue = (lossTensor.dataSync() as Float32Array)[0]
      lossTensor.dispose()
      xs.dispose()
      ys.dispose()
      if (!Number.isFinite(lossValue)) {
        throw new DivergenceError(
          `training diverged: loss ${lossValue} at epoch ${epoch}, step ${start / batchSize}`,
        )
      }
      lossSum += lossValue * batch.length
      seen += batch.length
    }
    const valAuc = auc(predictScores(model, valPaths), valLabels)
    history.push({ epoch, meanLoss: lossSum / seen, valAuc })
    if (valAuc > bestValAuc) {
      bestValAuc = valAuc
      bestEpoch = epoch
      bestWeights.forEach((w) => w.dispose())
      bestWeights = model.getWeights().map((w) => w.clone())
    }
  }

  model.setWeights(bestWeights)
  bestWeights.forEach((w) => w.dispose())
  optimizer.dispose()
  return { model, history, bestEpoch, bestValAuc }
}
