import { describe, expect, it } from 'vitest'
import { auc } from '../src/metrics'
import { makeRng } from './helpers'

function bruteforce(scores: number[], labels: number[]): number {
  let wins = 0
  let total = 0
  for (let i = 0; i < scores.length; i++) {
    if (labels[i] !== 1) continue
    for (let j = 0; j < scores.length; j++) {
      if (labels[j] !== 0) continue
      total += 1
      if (scores[i] > scores[j]) wins += 1
      else if (scores[i] === scores[j]) wins += 0.5
    }
  }
  return wins / total
}

describe('auc', () => {
  it('handles perfect separation and all-ties', () => {
    expect(auc([0, 0, 1, 1], [0, 0, 1, 1])).toBe(1)
    expect(auc([2, 2, 2, 2], [0, 1, 0, 1])).toBe(0.5)
  })

  it('matches pair counting with ties', () => {
    const rand = makeRng(5)
    for (let trial = 0; trial < 10; trial++) {
      const scores = Array.from({ length: 120 }, () => Math.floor(rand() * 8))
      const labels = scores.map(() => (rand() < 0.5 ? 1 : 0))
      if (!labels.includes(0)) labels[0] = 0
      if (!labels.includes(1)) labels[1] = 1
      expect(Math.abs(auc(scores, labels) - bruteforce(scores, labels))).toBeLessThanOrEqual(1e-12)
    }
  })

  it('rejects single-class input', () => {
    expect(() => auc([1, 2], [1, 1])).toThrow(/positive and one negative/)
  })
})
