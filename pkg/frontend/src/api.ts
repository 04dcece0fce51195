/** Typed client for the gsfill inpainting service. */

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export interface SessionInfo {
  session: string;
  gaussians: number;
  steps: number;
  state_hash: string;
  views: string[];
}

export interface ViewInfo {
  view: string;
  width: number;
  height: number;
  thumbnail: string; // data URI
}

export interface MaskUpload {
  mask: string;
  pixels: number;
  dilation_radius: number;
}

export interface StepReport {
  no_op: boolean;
  timings: Record<string, number>;
  losses: number[];
  masked_pixels: number;
  points_unprojected: number;
  points_filtered: number;
  scene_gaussians_removed: number;
  uncovered_pixels: number;
}

export interface StepRequest {
  view: string;
  mask: string;
  image: string;
  backend?: string;
  seed?: number;
  config?: Record<string, unknown>;
  shrink_to_uncovered?: boolean;
}

export interface StepResult {
  step: number;
  report: StepReport;
  state_hash: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function raise(response: Response): Promise<never> {
  let code = "http_error";
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    if (body?.detail?.code) {
      code = body.detail.code;
      message = body.detail.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status line
  }
  throw new ApiError(response.status, code, message);
}

export class StudioApi {
  constructor(
    private base: string = "",
    private fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.base + path, init);
    if (!response.ok) await raise(response);
    return (await response.json()) as T;
  }

  createSession(
    scene: string,
    cameras: string,
    config: Record<string, unknown> = {},
  ): Promise<SessionInfo & { views: string[] }> {
    return this.json("/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ scene, cameras, config }),
    });
  }

  info(session: string): Promise<SessionInfo> {
    return this.json(`/sessions/${session}`);
  }

  views(session: string, thumb = 48): Promise<{ views: ViewInfo[] }> {
    return this.json(`/sessions/${session}/views?thumb=${thumb}`);
  }

  /** URL for an <img> or fetch of a committed-state render. */
  renderUrl(
    session: string,
    view: string,
    mode: "color" | "depth" | "alpha" = "color",
    bust?: string,
  ): string {
    const suffix = bust ? `&t=${encodeURIComponent(bust)}` : "";
    return (
      `${this.base}/sessions/${session}/render` +
      `?view=${encodeURIComponent(view)}&mode=${mode}${suffix}`
    );
  }

  uploadMask(
    session: string,
    view: string,
    png: ArrayBuffer | Uint8Array | Blob,
  ): Promise<MaskUpload> {
    return this.json(
      `/sessions/${session}/mask?view=${encodeURIComponent(view)}`,
      { method: "POST", headers: { "content-type": "image/png" }, body: png as BodyInit },
    );
  }

  async fetchMaskPng(session: string, maskId: string): Promise<Uint8Array> {
    const response = await this.fetchImpl(
      `${this.base}/sessions/${session}/mask/${maskId}`,
    );
    if (!response.ok) await raise(response);
    return new Uint8Array(await response.arrayBuffer());
  }

  uploadImage(
    session: string,
    view: string,
    png: ArrayBuffer | Uint8Array | Blob,
  ): Promise<{ image: string }> {
    return this.json(
      `/sessions/${session}/image?view=${encodeURIComponent(view)}`,
      { method: "POST", headers: { "content-type": "image/png" }, body: png as BodyInit },
    );
  }

  step(session: string, request: StepRequest): Promise<StepResult> {
    return this.json(`/sessions/${session}/step`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
    });
  }

  async pointcloud(session: string, step: number): Promise<string> {
    const response = await this.fetchImpl(
      `${this.base}/sessions/${session}/pointcloud?step=${step}`,
    );
    if (!response.ok) await raise(response);
    return response.text();
  }

  undo(session: string): Promise<{ steps: number; state_hash: string }> {
    return this.json(`/sessions/${session}/undo`, { method: "POST" });
  }
}
