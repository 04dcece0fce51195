import assert from "node:assert/strict";
import { test } from "node:test";

import { StudioApi } from "./api.js";
import { SessionStore, validateImageDims } from "./state.js";

/** In-memory stand-in for the service, byte-faithful for uploads. */
function fakeService() {
  let stepCount = 0;
  let hash = "hash0";
  const masks = new Map<string, Uint8Array>();
  const calls: string[] = [];
  const fetchImpl = (async (url: string, init?: RequestInit) => {
    calls.push(`${init?.method ?? "GET"} ${url}`);
    const json = (body: unknown) =>
      new Response(JSON.stringify(body), {
        status: 200, headers: { "content-type": "application/json" },
      });
    if (url === "/sessions" && init?.method === "POST") {
      return json({ session: "s1", gaussians: 7, views: ["v0"], state_hash: hash });
    }
    if (url === "/sessions/s1") {
      return json({
        session: "s1", gaussians: 7, steps: stepCount,
        state_hash: hash, views: ["v0"],
      });
    }
    if (url.startsWith("/sessions/s1/mask?") && init?.method === "POST") {
      const id = `mask-${masks.size}`;
      const raw = init.body as ArrayBuffer | Uint8Array;
      masks.set(id, new Uint8Array(raw as ArrayBuffer));
      return json({ mask: id, pixels: 5, dilation_radius: 0 });
    }
    if (url.startsWith("/sessions/s1/mask/")) {
      const id = url.split("/").pop()!;
      const stored = masks.get(id)!;
      const copy = new ArrayBuffer(stored.byteLength);
      new Uint8Array(copy).set(stored);
      return new Response(copy, { status: 200 });
    }
    if (url.startsWith("/sessions/s1/image?") && init?.method === "POST") {
      return json({ image: "img-0" });
    }
    if (url === "/sessions/s1/step" && init?.method === "POST") {
      stepCount += 1;
      hash = `hash${stepCount}`;
      return json({
        step: stepCount,
        report: {
          no_op: false, timings: {}, losses: [0.2, 0.1], masked_pixels: 5,
          points_unprojected: 5, points_filtered: 0,
          scene_gaussians_removed: 0, uncovered_pixels: 0,
        },
        state_hash: hash,
      });
    }
    if (url === "/sessions/s1/undo" && init?.method === "POST") {
      stepCount -= 1;
      hash = `hash${stepCount}`;
      return json({ steps: stepCount, state_hash: hash });
    }
    return new Response(JSON.stringify({ detail: { code: "nope", message: url } }),
                        { status: 404 });
  }) as typeof fetch;
  return { fetchImpl, calls, masks };
}

function makeStore() {
  const service = fakeService();
  const store = new SessionStore(new StudioApi("", service.fetchImpl));
  return { store, service };
}

test("open mirrors the server info", async () => {
  const { store } = makeStore();
  const info = await store.open("scene.ply", "cams.json");
  assert.equal(info.session, "s1");
  assert.equal(store.stateHash, "hash0");
  assert.equal(store.history.length, 0);
});

test("runStep requires staged mask and image", async () => {
  const { store } = makeStore();
  await store.open("scene.ply", "cams.json");
  await assert.rejects(store.runStep("v0"), /no mask staged/);
  await store.attachMask("v0", new Uint8Array([1, 2, 3]));
  await assert.rejects(store.runStep("v0"), /no reference image staged/);
});

test("runStep appends history and refetches the server hash", async () => {
  const { store, service } = makeStore();
  await store.open("scene.ply", "cams.json");
  await store.attachMask("v0", new Uint8Array([9]));
  await store.attachImage("v0", new Uint8Array([8]));
  const entry = await store.runStep("v0", { seed: 4 });
  assert.equal(entry.step, 1);
  assert.equal(entry.stateHash, "hash1");
  assert.equal(store.history.length, 1);
  // the final call after a mutation is a refetch of session info
  assert.equal(service.calls[service.calls.length - 1], "GET /sessions/s1");
  assert.equal(store.info?.state_hash, "hash1");
});

test("undo pops history and refetches", async () => {
  const { store } = makeStore();
  await store.open("scene.ply", "cams.json");
  await store.attachMask("v0", new Uint8Array([9]));
  await store.attachImage("v0", new Uint8Array([8]));
  await store.runStep("v0");
  await store.undo();
  assert.equal(store.history.length, 0);
  assert.equal(store.stateHash, "hash0");
});

test("uploaded mask bytes come back identical from the fake service", async () => {
  const { store } = makeStore();
  await store.open("scene.ply", "cams.json");
  const payload = new Uint8Array([0, 255, 255, 0, 128]);
  const maskId = await store.attachMask("v0", payload);
  const served = await store.api.fetchMaskPng("s1", maskId);
  assert.deepEqual([...served], [...payload]);
});

test("validateImageDims flags mismatches and passes exact fits", () => {
  assert.equal(validateImageDims(64, 48, 64, 48), null);
  const message = validateImageDims(32, 48, 64, 48);
  assert.ok(message && message.includes("64x48"));
});
