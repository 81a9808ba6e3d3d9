/** Line-delimited JSON manifest reader (same schema as the Python kit). */

import * as fs from 'fs'

export interface VideoRecord {
  videoId: string
  subjectId: string
  label: 'real' | 'fake'
  frames: string[]
  landmarks: string
  split: 'train' | 'val' | 'test'
}

export class ManifestError extends Error {}

const FIELDS = ['video_id', 'subject_id', 'label', 'frames', 'landmarks', 'split'] as const

export function loadManifest(path: string): VideoRecord[] {
  const lines = fs.readFileSync(path, 'utf-8').split('\n')
  const records: VideoRecord[] = []
  const seen = new Set<string>()
  lines.forEach((line, idx) => {
    if (!line.trim()) return
    const lineNo = idx + 1
    let obj: any
    try {
      obj = JSON.parse(line)
    } catch (err) {
      throw new ManifestError(`line ${lineNo}: unparsable record: ${err}`)
    }
    for (const field of FIELDS) {
      if (!(field in obj)) throw new ManifestError(`line ${lineNo}: missing field '${field}'`)
    }
    if (obj.label !== 'real' && obj.label !== 'fake') {
      throw new ManifestError(`line ${lineNo}: bad label ${JSON.stringify(obj.label)}`)
    }
    if (!Array.isArray(obj.frames) || obj.frames.length === 0) {
      throw new ManifestError(`line ${lineNo}: 'frames' must be a non-empty list`)
    }
    if (seen.has(obj.video_id)) {
      throw new ManifestError(`line ${lineNo}: duplicate video_id '${obj.video_id}'`)
    }
    seen.add(obj.video_id)
    records.push({
      videoId: String(obj.video_id),
      subjectId: String(obj.subject_id),
      label: obj.label,
      frames: obj.frames.map(String),
      landmarks: String(obj.landmarks),
      split: obj.split,
    })
  })
  return records
}
