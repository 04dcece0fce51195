/** ASCII point-cloud PLY parser (x y z + uchar RGB), as served per step. */

export interface PointCloud {
  count: number;
  positions: Float32Array; // xyz interleaved
  colors: Float32Array; // rgb interleaved, [0, 1]
  center: [number, number, number];
  radius: number;
}

export function parsePointCloudPly(text: string): PointCloud {
  const lines = text.split("\n");
  let count = -1;
  let body = 0;
  const props: string[] = [];
  let inVertex = false;
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (i === 0 && line !== "ply") throw new Error("not a PLY file");
    if (line.startsWith("element ")) {
      const parts = line.split(/\s+/);
      inVertex = parts[1] === "vertex";
      if (inVertex) count = parseInt(parts[2], 10);
    } else if (line.startsWith("property ") && inVertex) {
      props.push(line.split(/\s+/)[2]);
    } else if (line === "end_header") {
      body = i + 1;
      break;
    }
  }
  if (count < 0) throw new Error("PLY header has no vertex element");
  const expected = ["x", "y", "z", "red", "green", "blue"];
  for (const name of expected) {
    if (!props.includes(name)) throw new Error(`PLY missing property ${name}`);
  }
  const col = (name: string) => props.indexOf(name);
  const ix = col("x"), iy = col("y"), iz = col("z");
  const ir = col("red"), ig = col("green"), ib = col("blue");

  const positions = new Float32Array(count * 3);
  const colors = new Float32Array(count * 3);
  const lo = [Infinity, Infinity, Infinity];
  const hi = [-Infinity, -Infinity, -Infinity];
  for (let v = 0; v < count; v++) {
    const fields = lines[body + v].trim().split(/\s+/);
    if (fields.length < props.length) {
      throw new Error(`vertex ${v} has ${fields.length} fields`);
    }
    const x = parseFloat(fields[ix]);
    const y = parseFloat(fields[iy]);
    const z = parseFloat(fields[iz]);
    positions[v * 3] = x;
    positions[v * 3 + 1] = y;
    positions[v * 3 + 2] = z;
    colors[v * 3] = parseInt(fields[ir], 10) / 255;
    colors[v * 3 + 1] = parseInt(fields[ig], 10) / 255;
    colors[v * 3 + 2] = parseInt(fields[ib], 10) / 255;
    const p = [x, y, z];
    for (let k = 0; k < 3; k++) {
      lo[k] = Math.min(lo[k], p[k]);
      hi[k] = Math.max(hi[k], p[k]);
    }
  }
  const center: [number, number, number] = count
    ? [(lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2, (lo[2] + hi[2]) / 2]
    : [0, 0, 0];
  let radius = 0;
  for (let v = 0; v < count; v++) {
    const dx = positions[v * 3] - center[0];
    const dy = positions[v * 3 + 1] - center[1];
    const dz = positions[v * 3 + 2] - center[2];
    radius = Math.max(radius, Math.hypot(dx, dy, dz));
  }
  return { count, positions, colors, center, radius: radius || 1 };
}
