/** Mask painting raster, independent of the DOM.
 *
 * The painter accumulates a soft float intensity field; export thresholds it
 * at 0.5 into the binary mask the server consumes. Keeping the core on plain
 * arrays makes the paint -> export -> re-import round trip testable without
 * a canvas.
 */

export type BrushMode = "brush" | "eraser";

export class MaskPainter {
  readonly data: Float32Array;

  constructor(
    readonly width: number,
    readonly height: number,
  ) {
    if (width <= 0 || height <= 0) {
      throw new RangeError(`bad mask size ${width}x${height}`);
    }
    this.data = new Float32Array(width * height);
  }

  /** Stamp a radial soft brush (linear falloff) centered at (cx, cy). */
  stamp(cx: number, cy: number, radius: number, mode: BrushMode = "brush"): void {
    const r = Math.max(radius, 0.5);
    const x0 = Math.max(Math.floor(cx - r), 0);
    const x1 = Math.min(Math.ceil(cx + r), this.width - 1);
    const y0 = Math.max(Math.floor(cy - r), 0);
    const y1 = Math.min(Math.ceil(cy + r), this.height - 1);
    for (let y = y0; y <= y1; y++) {
      for (let x = x0; x <= x1; x++) {
        const d = Math.hypot(x - cx, y - cy);
        if (d > r) continue;
        const weight = 1 - d / r;
        const i = y * this.width + x;
        if (mode === "brush") {
          this.data[i] = Math.max(this.data[i], weight);
        } else {
          // soft eraser: full strength at the center, untouched at the rim
          this.data[i] = Math.min(this.data[i], 1 - weight);
        }
      }
    }
  }

  /** Stamp along a stroke segment so fast pointer moves leave no gaps. */
  line(
    x0: number, y0: number, x1: number, y1: number,
    radius: number, mode: BrushMode = "brush",
  ): void {
    const steps = Math.max(Math.ceil(Math.hypot(x1 - x0, y1 - y0) / (radius / 2)), 1);
    for (let s = 0; s <= steps; s++) {
      const f = s / steps;
      this.stamp(x0 + f * (x1 - x0), y0 + f * (y1 - y0), radius, mode);
    }
  }

  clear(): void {
    this.data.fill(0);
  }

  /** Binary export: 255 where intensity passes the 0.5 threshold, else 0. */
  threshold(level = 0.5): Uint8Array {
    const out = new Uint8Array(this.data.length);
    for (let i = 0; i < this.data.length; i++) {
      out[i] = this.data[i] >= level ? 255 : 0;
    }
    return out;
  }

  loadBinary(bits: Uint8Array): void {
    if (bits.length !== this.data.length) {
      throw new RangeError(
        `mask payload has ${bits.length} pixels, expected ${this.data.length}`,
      );
    }
    for (let i = 0; i < bits.length; i++) {
      this.data[i] = bits[i] > 0 ? 1 : 0;
    }
  }

  maskedCount(level = 0.5): number {
    let n = 0;
    for (let i = 0; i < this.data.length; i++) {
      if (this.data[i] >= level) n++;
    }
    return n;
  }
}

export function binaryEqual(a: Uint8Array, b: Uint8Array): boolean {
  if (a.length !== b.length) return false;
  for (let i = 0; i < a.length; i++) {
    if ((a[i] > 0) !== (b[i] > 0)) return false;
  }
  return true;
}

/** Binary mask to RGBA overlay pixels (red, half-transparent). */
export function overlayPixels(bits: Uint8Array): Uint8ClampedArray {
  const out = new Uint8ClampedArray(bits.length * 4);
  for (let i = 0; i < bits.length; i++) {
    if (bits[i] > 0) {
      out[i * 4] = 255;
      out[i * 4 + 1] = 64;
      out[i * 4 + 2] = 64;
      out[i * 4 + 3] = 128;
    }
  }
  return out;
}
