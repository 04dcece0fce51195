/** Typed client for the gsfill inpainting service. */
export class ApiError extends Error {
    status;
    code;
    constructor(status, code, message) {
        super(message);
        this.status = status;
        this.code = code;
        this.name = "ApiError";
    }
}
async function raise(response) {
    let code = "http_error";
    let message = `${response.status} ${response.statusText}`;
    try {
        const body = await response.json();
        if (body?.detail?.code) {
            code = body.detail.code;
            message = body.detail.message ?? message;
        }
    }
    catch {
        // non-JSON error body; keep the status line
    }
    throw new ApiError(response.status, code, message);
}
export class StudioApi {
    base;
    fetchImpl;
    constructor(base = "", fetchImpl = (...args) => fetch(...args)) {
        this.base = base;
        this.fetchImpl = fetchImpl;
    }
    async json(path, init) {
        const response = await this.fetchImpl(this.base + path, init);
        if (!response.ok)
            await raise(response);
        return (await response.json());
    }
    createSession(scene, cameras, config = {}) {
        return this.json("/sessions", {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify({ scene, cameras, config }),
        });
    }
    info(session) {
        return this.json(`/sessions/${session}`);
    }
    views(session, thumb = 48) {
        return this.json(`/sessions/${session}/views?thumb=${thumb}`);
    }
    /** URL for an <img> or fetch of a committed-state render. */
    renderUrl(session, view, mode = "color", bust) {
        const suffix = bust ? `&t=${encodeURIComponent(bust)}` : "";
        return (`${this.base}/sessions/${session}/render` +
            `?view=${encodeURIComponent(view)}&mode=${mode}${suffix}`);
    }
    uploadMask(session, view, png) {
        return this.json(`/sessions/${session}/mask?view=${encodeURIComponent(view)}`, { method: "POST", headers: { "content-type": "image/png" }, body: png });
    }
    async fetchMaskPng(session, maskId) {
        const response = await this.fetchImpl(`${this.base}/sessions/${session}/mask/${maskId}`);
        if (!response.ok)
            await raise(response);
        return new Uint8Array(await response.arrayBuffer());
    }
    uploadImage(session, view, png) {
        return this.json(`/sessions/${session}/image?view=${encodeURIComponent(view)}`, { method: "POST", headers: { "content-type": "image/png" }, body: png });
    }
    step(session, request) {
        return this.json(`/sessions/${session}/step`, {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify(request),
        });
    }
    async pointcloud(session, step) {
        const response = await this.fetchImpl(`${this.base}/sessions/${session}/pointcloud?step=${step}`);
        if (!response.ok)
            await raise(response);
        return response.text();
    }
    undo(session) {
        return this.json(`/sessions/${session}/undo`, { method: "POST" });
    }
}
