import { defineConfig } from "vitest/config";

// Exercises a live workbench service; point MASK_STUDIO_API at its base
// URL (e.g. http://127.0.0.1:8000) before running `npm run integration`.
export default defineConfig({
  test: {
    include: ["integration/**/*.test.ts"],
    testTimeout: 300_000,
    hookTimeout: 300_000,
  },
});
