/** Orbit-camera math for the point-cloud inspector (column-major matrices). */

export interface OrbitState {
  target: [number, number, number];
  distance: number;
  yaw: number; // radians around +y
  pitch: number; // radians, clamped shy of the poles
}

const PITCH_LIMIT = Math.PI / 2 - 0.01;

export function rotate(state: OrbitState, dx: number, dy: number): OrbitState {
  return {
    ...state,
    yaw: state.yaw + dx,
    pitch: Math.max(-PITCH_LIMIT, Math.min(PITCH_LIMIT, state.pitch + dy)),
  };
}

export function zoom(state: OrbitState, factor: number): OrbitState {
  return { ...state, distance: Math.max(state.distance * factor, 1e-3) };
}

export function pan(state: OrbitState, dx: number, dy: number): OrbitState {
  // move the target in the camera's right/up plane
  const [right, up] = cameraBasis(state);
  const scale = state.distance;
  return {
    ...state,
    target: [
      state.target[0] + (right[0] * dx + up[0] * dy) * scale,
      state.target[1] + (right[1] * dx + up[1] * dy) * scale,
      state.target[2] + (right[2] * dx + up[2] * dy) * scale,
    ],
  };
}

export function eyePosition(state: OrbitState): [number, number, number] {
  const cp = Math.cos(state.pitch);
  return [
    state.target[0] + state.distance * cp * Math.sin(state.yaw),
    state.target[1] + state.distance * Math.sin(state.pitch),
    state.target[2] - state.distance * cp * Math.cos(state.yaw),
  ];
}

function cameraBasis(state: OrbitState): [number[], number[], number[]] {
  const eye = eyePosition(state);
  const fwd = normalize([
    state.target[0] - eye[0],
    state.target[1] - eye[1],
    state.target[2] - eye[2],
  ]);
  const right = normalize(cross(fwd, [0, 1, 0]));
  const up = cross(right, fwd);
  return [right, up, fwd];
}

function cross(a: number[], b: number[]): number[] {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

function normalize(v: number[]): number[] {
  const n = Math.hypot(v[0], v[1], v[2]) || 1;
  return [v[0] / n, v[1] / n, v[2] / n];
}

export function viewMatrix(state: OrbitState): Float32Array {
  const eye = eyePosition(state);
  const [right, up, fwd] = cameraBasis(state);
  // row-major rotation into camera axes (z looks forward), column-major out
  const m = new Float32Array(16);
  m[0] = right[0]; m[4] = right[1]; m[8] = right[2];
  m[1] = up[0]; m[5] = up[1]; m[9] = up[2];
  m[2] = -fwd[0]; m[6] = -fwd[1]; m[10] = -fwd[2];
  m[12] = -(right[0] * eye[0] + right[1] * eye[1] + right[2] * eye[2]);
  m[13] = -(up[0] * eye[0] + up[1] * eye[1] + up[2] * eye[2]);
  m[14] = fwd[0] * eye[0] + fwd[1] * eye[1] + fwd[2] * eye[2];
  m[15] = 1;
  return m;
}

export function perspectiveMatrix(
  fovY: number, aspect: number, near: number, far: number,
): Float32Array {
  const f = 1 / Math.tan(fovY / 2);
  const m = new Float32Array(16);
  m[0] = f / aspect;
  m[5] = f;
  m[10] = (far + near) / (near - far);
  m[11] = -1;
  m[14] = (2 * far * near) / (near - far);
  return m;
}

export function multiply(a: Float32Array, b: Float32Array): Float32Array {
  const out = new Float32Array(16);
  for (let col = 0; col < 4; col++) {
    for (let row = 0; row < 4; row++) {
      let sum = 0;
      for (let k = 0; k < 4; k++) {
        sum += a[k * 4 + row] * b[col * 4 + k];
      }
      out[col * 4 + row] = sum;
    }
  }
  return out;
}

/** Project a world point to normalized device coordinates; null if clipped. */
export function projectPoint(
  mvp: Float32Array, p: [number, number, number],
): [number, number, number] | null {
  const x = mvp[0] * p[0] + mvp[4] * p[1] + mvp[8] * p[2] + mvp[12];
  const y = mvp[1] * p[0] + mvp[5] * p[1] + mvp[9] * p[2] + mvp[13];
  const z = mvp[2] * p[0] + mvp[6] * p[1] + mvp[10] * p[2] + mvp[14];
  const w = mvp[3] * p[0] + mvp[7] * p[1] + mvp[11] * p[2] + mvp[15];
  if (w <= 0) return null;
  return [x / w, y / w, z / w];
}
