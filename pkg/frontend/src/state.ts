/** Client-side session mirror.
 *
 * The server owns all state; this store caches the latest server answers and
 * refetches after every mutation so it can never drift. Pending mask/image
 * references are per-view staging for the next step.
 */

import { StudioApi, SessionInfo, StepReport, StepRequest } from "./api.js";

export interface StepEntry {
  step: number;
  view: string;
  report: StepReport;
  stateHash: string;
}

export interface PendingRefs {
  mask?: string;
  image?: string;
}

export function validateImageDims(
  imageWidth: number,
  imageHeight: number,
  viewWidth: number,
  viewHeight: number,
): string | null {
  if (imageWidth === viewWidth && imageHeight === viewHeight) return null;
  return (
    `image is ${imageWidth}x${imageHeight} but the view needs ` +
    `${viewWidth}x${viewHeight}`
  );
}

export class SessionStore {
  info: SessionInfo | null = null;
  history: StepEntry[] = [];
  pending: Map<string, PendingRefs> = new Map();
  busy = false;

  constructor(readonly api: StudioApi) {}

  get sessionId(): string {
    if (!this.info) throw new Error("no session open");
    return this.info.session;
  }

  get stateHash(): string | null {
    return this.info?.state_hash ?? null;
  }

  async open(
    scene: string,
    cameras: string,
    config: Record<string, unknown> = {},
  ): Promise<SessionInfo> {
    const created = await this.api.createSession(scene, cameras, config);
    this.history = [];
    this.pending.clear();
    this.info = await this.api.info(created.session);
    return this.info;
  }

  async refresh(): Promise<SessionInfo> {
    this.info = await this.api.info(this.sessionId);
    return this.info;
  }

  pendingFor(view: string): PendingRefs {
    let refs = this.pending.get(view);
    if (!refs) {
      refs = {};
      this.pending.set(view, refs);
    }
    return refs;
  }

  async attachMask(
    view: string,
    png: ArrayBuffer | Uint8Array | Blob,
  ): Promise<string> {
    const upload = await this.api.uploadMask(this.sessionId, view, png);
    this.pendingFor(view).mask = upload.mask;
    return upload.mask;
  }

  async attachImage(
    view: string,
    png: ArrayBuffer | Uint8Array | Blob,
  ): Promise<string> {
    const upload = await this.api.uploadImage(this.sessionId, view, png);
    this.pendingFor(view).image = upload.image;
    return upload.image;
  }

  /** Run one progressive step with the staged mask/image for the view. */
  async runStep(
    view: string,
    options: Partial<StepRequest> = {},
  ): Promise<StepEntry> {
    const refs = this.pendingFor(view);
    if (!refs.mask) throw new Error(`no mask staged for view ${view}`);
    if (!refs.image) throw new Error(`no reference image staged for view ${view}`);
    this.busy = true;
    try {
      const result = await this.api.step(this.sessionId, {
        view,
        mask: refs.mask,
        image: refs.image,
        ...options,
      });
      const entry: StepEntry = {
        step: result.step,
        view,
        report: result.report,
        stateHash: result.state_hash,
      };
      this.history.push(entry);
      await this.refresh();
      return entry;
    } finally {
      this.busy = false;
    }
  }

  async undo(): Promise<void> {
    this.busy = true;
    try {
      await this.api.undo(this.sessionId);
      this.history.pop();
      await this.refresh();
    } finally {
      this.busy = false;
    }
  }
}
