/** Mann-Whitney AUC with midrank tie handling (validation protocol metric). */

export function auc(scores: number[], labels: number[]): number {
  if (scores.length !== labels.length) throw new Error('scores/labels length mismatch')
  const n = scores.length
  const nPos = labels.reduce((a, l) => a + l, 0)
  const nNeg = n - nPos
  if (nPos === 0 || nNeg === 0) {
    throw new Error('AUC needs at least one positive and one negative sample')
  }
  const order = Array.from({ length: n }, (_, i) => i).sort((a, b) => scores[a] - scores[b])
  const ranks = new Float64Array(n)
  let i = 0
  while (i < n) {
    let j = i
    while (j + 1 < n && scores[order[j + 1]] === scores[order[i]]) j++
    const rank = 0.5 * (i + j) + 1
    for (let k = i; k <= j; k++) ranks[order[k]] = rank
    i = j + 1
  }
  let posRankSum = 0
  for (let k = 0; k < n; k++) if (labels[k] === 1) posRankSum += ranks[k]
  return (posRankSum - (nPos * (nPos + 1)) / 2) / (nPos * nNeg)
}
