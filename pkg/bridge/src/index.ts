export {
  CheckpointError,
  DEFAULT_BACKBONE,
  EMBEDDING_DIM,
  EMBEDDING_LAYER,
  TRAINING_PRESETS,
  buildBackbone,
  embeddingModel,
  loadCheckpoint,
  saveCheckpoint,
  weightBytes,
} from './backbone'
export { EmbeddingFormatError, readEmbeddings, writeEmbeddings } from './format'
export type { EmbeddingEntry } from './format'
export { exportEmbeddings } from './export'
export type { BridgeConfig, ExportResult } from './export'
export { DivergenceError, evaluateBce, finetuneOnPseudofakes } from './finetune'
export type { EpochStats, FinetuneOptions, FinetuneResult } from './finetune'
export { loadManifest, ManifestError } from './manifest'
export type { VideoRecord } from './manifest'
export { normalize, readPng, writePng, INPUT_SIZE } from './image'
export type { RgbImage } from './image'
export { auc } from './metrics'
