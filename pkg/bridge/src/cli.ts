#!/usr/bin/env node
/**
 * bridge export   --manifest <path> --out <path> [--backbone toy-1792]
 *                 [--checkpoint <path>] [--batch 32]
 * bridge finetune --synth-dir <dir> --real-dir <dir> --epochs <n> --out <path>
 *                 [--lr 0.001] [--batch 16] [--seed 0]
 */

import * as fs from 'fs'
import * as path from 'path'
import { DEFAULT_BACKBONE, saveCheckpoint } from './backbone'
import { exportEmbeddings } from './export'
import { finetuneOnPseudofakes } from './finetune'

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>()
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i]
    if (!key.startsWith('--') || i + 1 >= argv.length) {
      throw new Error(`expected --flag value pairs, got '${argv.slice(i).join(' ')}'`)
    }
    flags.set(key.slice(2), argv[i + 1])
  }
  return flags
}

function required(flags: Map<string, string>, name: string): string {
  const value = flags.get(name)
  if (value === undefined) throw new Error(`missing required flag --${name}`)
  return value
}

function pngsIn(dir: string): string[] {
  return fs
    .readdirSync(dir)
    .filter((f) => f.endsWith('.png') && !f.endsWith('_mask.png'))
    .sort()
    .map((f) => path.join(dir, f))
}

async function runExport(flags: Map<string, string>): Promise<void> {
  const result = await exportEmbeddings(required(flags, 'manifest'), {
    outPath: required(flags, 'out'),
    backbone: flags.get('backbone') ?? DEFAULT_BACKBONE,
    checkpoint: flags.get('checkpoint'),
    batchSize: Number(flags.get('batch') ?? 32),
  })
  console.log(`wrote ${result.count} embeddings (dim ${result.dim}) to ${flags.get('out')}`)
}

async function runFinetune(flags: Map<string, string>): Promise<void> {
  const realPaths = pngsIn(required(flags, 'real-dir'))
  const pseudoPaths = pngsIn(required(flags, 'synth-dir'))
  const out = required(flags, 'out')
  const result = await finetuneOnPseudofakes(realPaths, pseudoPaths, {
    epochs: Number(required(flags, 'epochs')),
    learningRate: Number(flags.get('lr') ?? 1e-3),
    batchSize: Number(flags.get('batch') ?? 16),
    seed: Number(flags.get('seed') ?? 0),
  })
  for (const stats of result.history) {
    console.log(
      `epoch ${stats.epoch}: loss ${stats.meanLoss.toFixed(4)} val-auc ${stats.valAuc.toFixed(3)}`,
    )
  }
  console.log(`best epoch ${result.bestEpoch} (val-auc ${result.bestValAuc.toFixed(3)})`)
  await saveCheckpoint(result.model, out)
  console.log(`wrote checkpoint to ${out}`)
}

async function main(): Promise<void> {
  const [command, ...rest] = process.argv.slice(2)
  try {
    if (command === 'export') {
      await runExport(parseFlags(rest))
    } else if (command === 'finetune') {
      await runFinetune(parseFlags(rest))
    } else {
      console.error('usage: bridge <export|finetune> --flag value ...')
      process.exitCode = 2
    }
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err))
    process.exitCode = 1
  }
}

main()
