import { defineConfig } from 'vitest/config'

// single-CPU friendly: run files sequentially, allow slow CPU training runs
export default defineConfig({
  test: {
    include: ['test/**/*.test.ts'],
    fileParallelism: false,
    testTimeout: 300_000,
    hookTimeout: 120_000,
  },
})
