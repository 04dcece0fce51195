import assert from "node:assert/strict";
import { test } from "node:test";

import { pollUntil } from "./poll.js";

test("resolves once the probe reports done", async () => {
  let calls = 0;
  const value = await pollUntil(
    async () => ++calls,
    { intervalMs: 1, timeoutMs: 1000, isDone: (n) => n >= 3 },
  );
  assert.equal(value, 3);
  assert.equal(calls, 3);
});

test("times out when the probe never finishes", async () => {
  await assert.rejects(
    pollUntil(async () => 0, { intervalMs: 1, timeoutMs: 10, isDone: () => false }),
    /timed out/,
  );
});

test("probe errors propagate immediately", async () => {
  await assert.rejects(
    pollUntil(
      async () => {
        throw new Error("backend gone");
      },
      { intervalMs: 1, timeoutMs: 50, isDone: () => true },
    ),
    /backend gone/,
  );
});
