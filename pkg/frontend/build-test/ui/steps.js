/** Step runner and the progressive history panel. */
import { lossPolyline, formatLoss } from "../plot.js";
export class StepRunner {
    store;
    view = null;
    runBtn;
    status;
    plot;
    onStepDone = () => { };
    constructor(root, store) {
        this.store = store;
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
    setView(view) {
        this.view = view;
        this.refreshEnabled();
    }
    refreshEnabled() {
        const refs = this.view ? this.store.pendingFor(this.view.view) : undefined;
        this.runBtn.disabled =
            this.store.busy || !refs || !refs.mask || !refs.image;
    }
    async run() {
        if (!this.view)
            return;
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
        }
        catch (err) {
            this.status.textContent = `step failed: ${err.message}`;
        }
        finally {
            this.refreshEnabled();
        }
    }
    drawLosses(losses) {
        const ctx = this.plot.getContext("2d");
        ctx.clearRect(0, 0, this.plot.width, this.plot.height);
        if (losses.length === 0)
            return;
        const { points, yMin, yMax } = lossPolyline(losses, this.plot.width, this.plot.height);
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
    root;
    store;
    onChanged = () => { };
    constructor(root, store) {
        this.root = root;
        this.store = store;
    }
    render() {
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
    async undo() {
        await this.store.undo();
        this.render();
        this.onChanged();
    }
}
