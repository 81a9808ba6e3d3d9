import * as path from 'path'
import { describe, expect, it } from 'vitest'
import { buildBackbone, weightBytes } from '../src/backbone'
import { evaluateBce, finetuneOnPseudofakes } from '../src/finetune'
import { makeRng, tempDir, writeImages } from './helpers'

const LN2 = Math.log(2)

/** Linearly separable toy corpus: pseudo-deepfakes are much brighter. */
function separableFixture(nPerClass: number) {
  const dir = tempDir('ft-')
  const real = writeImages(path.join(dir, 'real'), nPerClass, makeRng(21), 90)
  const pseudo = writeImages(path.join(dir, 'pseudo'), nPerClass, makeRng(22), 170)
  return { real, pseudo }
}

describe('fine-tuning', () => {
  it('starts at ln 2 binary cross-entropy on balanced data', () => {
    const { real, pseudo } = separableFixture(8)
    const model = buildBackbone()
    const loss = evaluateBce(model, [...real, ...pseudo], [
      ...real.map(() => 0),
      ...pseudo.map(() => 1),
    ])
    expect(Math.abs(loss - LN2)).toBeLessThan(0.05)
  }, 120_000)

  it('reaches validation AUC > 0.9 after one epoch on a separable fixture', async () => {
    const { real, pseudo } = separableFixture(24)
    const result = await finetuneOnPseudofakes(real, pseudo, { epochs: 1, seed: 0 })
    expect(result.history.length).toBe(1)
    expect(result.history[0].valAuc).toBeGreaterThan(0.9)
    expect(result.bestValAuc).toBeGreaterThan(0.9)
  }, 300_000)

  it('returns the initialization unchanged for zero epochs', async () => {
    const { real, pseudo } = separableFixture(6)
    const result = await finetuneOnPseudofakes(real, pseudo, { epochs: 0, seed: 4 })
    expect(result.history).toEqual([])
    expect(result.bestEpoch).toBe(0)
    const init = await weightBytes(buildBackbone('toy-1792', 4))
    expect((await weightBytes(result.model)).equals(init)).toBe(true)
  }, 120_000)

  it('decreases the training loss over a second epoch', async () => {
    const { real, pseudo } = separableFixture(24)
    const result = await finetuneOnPseudofakes(real, pseudo, { epochs: 2, seed: 0 })
    expect(result.history[1].meanLoss).toBeLessThan(result.history[0].meanLoss)
  }, 300_000)

  it('rejects an empty class', async () => {
    const { real } = separableFixture(2)
    await expect(finetuneOnPseudofakes(real, [], { epochs: 1 })).rejects.toThrow(/non-empty/)
    await expect(finetuneOnPseudofakes([], real, { epochs: 1 })).rejects.toThrow(/non-empty/)
  }, 120_000)
})
