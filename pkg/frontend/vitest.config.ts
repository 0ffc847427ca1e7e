import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    globalSetup: ["tests/globalSetup.ts"],
    testTimeout: 20_000,
    hookTimeout: 90_000,
  },
});
