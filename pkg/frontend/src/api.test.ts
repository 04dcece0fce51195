import assert from "node:assert/strict";
import { test } from "node:test";

import { ApiError, StudioApi } from "./api.js";

interface Call {
  url: string;
  init?: RequestInit;
}

function mockFetch(
  handler: (url: string, init?: RequestInit) => { status?: number; body: unknown },
): { fetch: typeof fetch; calls: Call[] } {
  const calls: Call[] = [];
  const fetchImpl = (async (url: string, init?: RequestInit) => {
    calls.push({ url, init });
    const { status = 200, body } = handler(url, init);
    const payload = typeof body === "string" ? body : JSON.stringify(body);
    return new Response(payload, {
      status,
      headers: { "content-type": "application/json" },
    });
  }) as typeof fetch;
  return { fetch: fetchImpl, calls };
}

test("createSession posts paths and config", async () => {
  const { fetch, calls } = mockFetch(() => ({
    body: { session: "abc", gaussians: 10, views: ["v0"], state_hash: "h0" },
  }));
  const api = new StudioApi("", fetch);
  const info = await api.createSession("s.ply", "c.json", { seed: 3 });
  assert.equal(info.session, "abc");
  assert.equal(calls[0].url, "/sessions");
  const sent = JSON.parse(String(calls[0].init?.body));
  assert.deepEqual(sent, { scene: "s.ply", cameras: "c.json", config: { seed: 3 } });
});

test("error envelope becomes ApiError with the machine code", async () => {
  const { fetch } = mockFetch(() => ({
    status: 404,
    body: { detail: { code: "unknown_view", message: "view nope not found" } },
  }));
  const api = new StudioApi("", fetch);
  await assert.rejects(
    api.info("nope"),
    (err: unknown) =>
      err instanceof ApiError &&
      err.code === "unknown_view" &&
      err.status === 404,
  );
});

test("step posts the full request", async () => {
  const { fetch, calls } = mockFetch(() => ({
    body: {
      step: 1,
      report: { no_op: false, losses: [0.5, 0.1] },
      state_hash: "h1",
    },
  }));
  const api = new StudioApi("", fetch);
  const result = await api.step("abc", {
    view: "v0", mask: "m1", image: "i1", seed: 9,
  });
  assert.equal(result.state_hash, "h1");
  assert.equal(calls[0].url, "/sessions/abc/step");
  const sent = JSON.parse(String(calls[0].init?.body));
  assert.equal(sent.mask, "m1");
  assert.equal(sent.seed, 9);
});

test("renderUrl encodes view, mode, and cache-buster", () => {
  const api = new StudioApi("http://host");
  assert.equal(
    api.renderUrl("abc", "frame 1", "alpha", "hash9"),
    "http://host/sessions/abc/render?view=frame%201&mode=alpha&t=hash9",
  );
});

test("non-JSON error body still raises with the status line", async () => {
  const fetchImpl = (async () =>
    new Response("<html>boom</html>", { status: 500, statusText: "Server Error" })
  ) as typeof fetch;
  const api = new StudioApi("", fetchImpl);
  await assert.rejects(
    api.info("x"),
    (err: unknown) => err instanceof ApiError && err.code === "http_error",
  );
});
