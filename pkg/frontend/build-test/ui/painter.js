/** Mask painting over the selected view, plus the reference-image uploader.
 *
 * Painting happens at native view resolution on the soft-brush raster; export
 * thresholds at 0.5, encodes a PNG via canvas, posts it, then swaps in the
 * server's dilated version so the operator sees exactly what a step will use.
 */
import { MaskPainter, overlayPixels } from "../mask.js";
import { validateImageDims } from "../state.js";
export class MaskPainterPanel {
    api;
    store;
    painter = null;
    view = null;
    canvas;
    status;
    brushRadius = 8;
    mode = "brush";
    drawing = false;
    last = null;
    onMaskUploaded = () => { };
    constructor(root, api, store) {
        this.api = api;
        this.store = store;
        this.canvas = document.createElement("canvas");
        this.canvas.className = "paint";
        this.status = document.createElement("div");
        this.status.className = "status";
        const controls = document.createElement("div");
        controls.className = "controls";
        const brushBtn = button("brush", () => (this.mode = "brush"));
        const eraserBtn = button("eraser", () => (this.mode = "eraser"));
        const clearBtn = button("clear", () => {
            this.painter?.clear();
            this.repaint();
        });
        const size = document.createElement("input");
        size.type = "range";
        size.min = "2";
        size.max = "40";
        size.value = String(this.brushRadius);
        size.addEventListener("input", () => {
            this.brushRadius = Number(size.value);
        });
        const exportBtn = button("upload mask", () => void this.upload());
        controls.append(brushBtn, eraserBtn, size, clearBtn, exportBtn);
        root.append(controls, this.canvas, this.status);
        this.canvas.addEventListener("pointerdown", (e) => {
            this.drawing = true;
            this.last = this.pixelOf(e);
            this.strokeTo(this.last);
        });
        this.canvas.addEventListener("pointermove", (e) => {
            if (this.drawing)
                this.strokeTo(this.pixelOf(e));
        });
        for (const kind of ["pointerup", "pointerleave"]) {
            this.canvas.addEventListener(kind, () => {
                this.drawing = false;
                this.last = null;
            });
        }
    }
    setView(view) {
        this.view = view;
        this.painter = new MaskPainter(view.width, view.height);
        this.canvas.width = view.width;
        this.canvas.height = view.height;
        this.canvas.style.backgroundImage =
            `url(${this.api.renderUrl(this.store.sessionId, view.view, "color", this.store.stateHash ?? "")})`;
        this.repaint();
    }
    pixelOf(e) {
        const rect = this.canvas.getBoundingClientRect();
        return [
            ((e.clientX - rect.left) / rect.width) * this.canvas.width,
            ((e.clientY - rect.top) / rect.height) * this.canvas.height,
        ];
    }
    strokeTo(point) {
        if (!this.painter)
            return;
        const from = this.last ?? point;
        this.painter.line(from[0], from[1], point[0], point[1], this.brushRadius, this.mode);
        this.last = point;
        this.repaint();
    }
    repaint() {
        if (!this.painter)
            return;
        const ctx = this.canvas.getContext("2d");
        ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
        const bits = this.painter.threshold();
        const image = new ImageData(overlayPixels(bits), this.painter.width, this.painter.height);
        ctx.putImageData(image, 0, 0);
    }
    async upload() {
        if (!this.painter || !this.view)
            return;
        const bits = this.painter.threshold();
        if (!bits.some((v) => v > 0)) {
            this.status.textContent = "mask is empty; paint something first";
            return;
        }
        const png = await binaryMaskPng(bits, this.painter.width, this.painter.height);
        try {
            const maskId = await this.store.attachMask(this.view.view, png);
            // show what the server will actually use (dilated)
            const served = await this.api.fetchMaskPng(this.store.sessionId, maskId);
            await this.showServedMask(served);
            this.status.textContent = `uploaded ${maskId} (server-side dilation applied)`;
            this.onMaskUploaded(maskId);
        }
        catch (err) {
            this.status.textContent = `mask upload failed: ${err.message}`;
        }
    }
    async showServedMask(png) {
        const ab = new ArrayBuffer(png.byteLength);
        new Uint8Array(ab).set(png);
        const bitmap = await createImageBitmap(new Blob([ab], { type: "image/png" }));
        const scratch = document.createElement("canvas");
        scratch.width = bitmap.width;
        scratch.height = bitmap.height;
        const sctx = scratch.getContext("2d");
        sctx.drawImage(bitmap, 0, 0);
        const data = sctx.getImageData(0, 0, bitmap.width, bitmap.height).data;
        const bits = new Uint8Array(bitmap.width * bitmap.height);
        for (let i = 0; i < bits.length; i++)
            bits[i] = data[i * 4] > 0 ? 255 : 0;
        this.painter?.loadBinary(bits);
        this.repaint();
    }
}
export class ReferenceUploader {
    store;
    view = null;
    status;
    onImageUploaded = () => { };
    constructor(root, store) {
        this.store = store;
        const input = document.createElement("input");
        input.type = "file";
        input.accept = "image/png";
        this.status = document.createElement("div");
        this.status.className = "status";
        root.append(input, this.status);
        input.addEventListener("change", () => {
            const file = input.files?.[0];
            if (file)
                void this.upload(file);
        });
    }
    setView(view) {
        this.view = view;
    }
    async upload(file) {
        if (!this.view) {
            this.status.textContent = "select a view first";
            return;
        }
        const bitmap = await createImageBitmap(file);
        const problem = validateImageDims(bitmap.width, bitmap.height, this.view.width, this.view.height);
        if (problem) {
            this.status.textContent = problem; // validated locally; nothing sent
            return;
        }
        try {
            const imageId = await this.store.attachImage(this.view.view, file);
            this.status.textContent = `attached reference ${imageId}`;
            this.onImageUploaded(imageId);
        }
        catch (err) {
            this.status.textContent = `upload failed: ${err.message}`;
        }
    }
}
async function binaryMaskPng(bits, width, height) {
    const canvas = document.createElement("canvas");
    canvas.width = width;
    canvas.height = height;
    const ctx = canvas.getContext("2d");
    const rgba = new Uint8ClampedArray(bits.length * 4);
    for (let i = 0; i < bits.length; i++) {
        const v = bits[i] > 0 ? 255 : 0;
        rgba[i * 4] = v;
        rgba[i * 4 + 1] = v;
        rgba[i * 4 + 2] = v;
        rgba[i * 4 + 3] = 255;
    }
    ctx.putImageData(new ImageData(rgba, width, height), 0, 0);
    return new Promise((resolve, reject) => canvas.toBlob((blob) => (blob ? resolve(blob) : reject(new Error("PNG encode failed"))), "image/png"));
}
function button(label, onClick) {
    const b = document.createElement("button");
    b.textContent = label;
    b.addEventListener("click", onClick);
    return b;
}
