import assert from "node:assert/strict";
import { test } from "node:test";

import { parsePointCloudPly } from "./ply.js";

const SAMPLE = [
  "ply",
  "format ascii 1.0",
  "element vertex 3",
  "property float x",
  "property float y",
  "property float z",
  "property uchar red",
  "property uchar green",
  "property uchar blue",
  "end_header",
  "0 0 0 255 0 0",
  "2 0 0 0 255 0",
  "0 2 0 0 0 255",
  "",
].join("\n");

test("parses the service's ASCII point-cloud format", () => {
  const cloud = parsePointCloudPly(SAMPLE);
  assert.equal(cloud.count, 3);
  assert.deepEqual([...cloud.positions.slice(3, 6)], [2, 0, 0]);
  assert.equal(cloud.colors[0], 1);
  assert.equal(cloud.colors[4], 1);
  assert.deepEqual(cloud.center, [1, 1, 0]);
  assert.ok(Math.abs(cloud.radius - Math.hypot(1, 1)) < 1e-6);
});

test("rejects non-PLY input", () => {
  assert.throws(() => parsePointCloudPly("solid teapot"), /not a PLY/);
});

test("rejects missing color properties", () => {
  const text = SAMPLE.replace("property uchar red\n", "");
  assert.throws(() => parsePointCloudPly(text), /missing property red/);
});

test("rejects truncated vertex lines", () => {
  const lines = SAMPLE.trimEnd().split("\n");
  lines[lines.length - 1] = "0 2";
  assert.throws(() => parsePointCloudPly(lines.join("\n")), /fields/);
});
