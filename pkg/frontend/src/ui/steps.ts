/** Step runner and the progressive history panel. */

import { ViewInfo } from "../api.js";
import { lossPolyline, formatLoss } from "../plot.js";
import { SessionStore, StepEntry } from "../state.js";

export class StepRunner {
  private view: ViewInfo | null = null;
  private runBtn: HTMLButtonElement;
  private status: HTMLElement;
  private plot: HTMLCanvasElement;
  onStepDone: (entry: StepEntry) => void = () => {};

  constructor(root: HTMLElement, private store: SessionStore) {
    this.runBtn = document.createElement("button");
    this.runBtn.textContent = "run inpainting step";
    this.status = document.createElement("div");
    this.status.className = "status";
    this.plot = document.createElement("canvas");
    this.plot.width = 360;
    this.plot.height = 120;
    this.plot.className = "plot";
    root.append(this.runBtn, this.status, this.plot);
    this.runBtn.addEventListener("click", () => void this.run());
  }

  setView(view: ViewInfo): void {
    this.view = view;
    this.refreshEnabled();
  }

  refreshEnabled(): void {
    const refs = this.view ? this.store.pendingFor(this.view.view) : undefined;
    this.runBtn.disabled =
      this.store.busy || !refs || !refs.mask || !refs.image;
  }

  private async run(): Promise<void> {
    if (!this.view) return;
    this.runBtn.disabled = true;
    this.status.textContent = "running step (the optimizer is busy)...";
    try {
      const entry = await this.store.runStep(this.view.view);
      const r = entry.report;
      this.status.textContent = r.no_op
        ? "no-op: the mask covers nothing the scene is missing"
        : `step ${entry.step}: +${r.points_unprojected - r.points_filtered} points, ` +
          `uncovered ${r.uncovered_pixels}px, ` +
          `final loss ${formatLoss(r.losses[r.losses.length - 1] ?? 0)}`;
      this.drawLosses(r.losses);
      this.onStepDone(entry);
    } catch (err) {
      this.status.textContent = `step failed: ${(err as Error).message}`;
    } finally {
      this.refreshEnabled();
    }
  }

  private drawLosses(losses: number[]): void {
    const ctx = this.plot.getContext("2d")!;
    ctx.clearRect(0, 0, this.plot.width, this.plot.height);
    if (losses.length === 0) return;
    const { points, yMin, yMax } = lossPolyline(
      losses, this.plot.width, this.plot.height,
    );
    ctx.strokeStyle = "#7cc4ff";
    ctx.beginPath();
    points.forEach(([x, y], i) => (i ? ctx.lineTo(x, y) : ctx.moveTo(x, y)));
    ctx.stroke();
    ctx.fillStyle = "#9aa";
    ctx.font = "10px monospace";
    ctx.fillText(formatLoss(yMax), 2, 10);
    ctx.fillText(formatLoss(yMin), 2, this.plot.height - 2);
  }
}

export class ProgressivePanel {
  onChanged: () => void = () => {};

  constructor(private root: HTMLElement, private store: SessionStore) {}

  render(): void {
    this.root.innerHTML = "";
    const list = document.createElement("ol");
    for (const entry of this.store.history) {
      const item = document.createElement("li");
      const uncovered = entry.report.uncovered_pixels;
      item.textContent = entry.report.no_op
        ? `${entry.view}: no-op`
        : `${entry.view}: ${entry.report.points_unprojected} points, ` +
          `${uncovered} uncovered px`;
      list.appendChild(item);
    }
    const undoBtn = document.createElement("button");
    undoBtn.textContent = "undo last step";
    undoBtn.disabled = this.store.history.length === 0 || this.store.busy;
    undoBtn.addEventListener("click", () => void this.undo());
    const hash = document.createElement("div");
    hash.className = "hash";
    hash.textContent = `state ${this.store.stateHash?.slice(0, 16) ?? "-"}`;
    this.root.append(list, undoBtn, hash);
  }

  private async undo(): Promise<void> {
    await this.store.undo();
    this.render();
    this.onChanged();
  }
}
