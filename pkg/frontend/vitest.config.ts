import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    // The integration suite spawns the command server (a Python process)
    // and waits for it to bind; give it room.
    testTimeout: 30_000,
    hookTimeout: 30_000,
  },
});
