/** Client-side session mirror.
 *
 * The server owns all state; this store caches the latest server answers and
 * refetches after every mutation so it can never drift. Pending mask/image
 * references are per-view staging for the next step.
 */
export function validateImageDims(imageWidth, imageHeight, viewWidth, viewHeight) {
    if (imageWidth === viewWidth && imageHeight === viewHeight)
        return null;
    return (`image is ${imageWidth}x${imageHeight} but the view needs ` +
        `${viewWidth}x${viewHeight}`);
}
export class SessionStore {
    api;
    info = null;
    history = [];
    pending = new Map();
    busy = false;
    constructor(api) {
        this.api = api;
    }
    get sessionId() {
        if (!this.info)
            throw new Error("no session open");
        return this.info.session;
    }
    get stateHash() {
        return this.info?.state_hash ?? null;
    }
    async open(scene, cameras, config = {}) {
        const created = await this.api.createSession(scene, cameras, config);
        this.history = [];
        this.pending.clear();
        this.info = await this.api.info(created.session);
        return this.info;
    }
    async refresh() {
        this.info = await this.api.info(this.sessionId);
        return this.info;
    }
    pendingFor(view) {
        let refs = this.pending.get(view);
        if (!refs) {
            refs = {};
            this.pending.set(view, refs);
        }
        return refs;
    }
    async attachMask(view, png) {
        const upload = await this.api.uploadMask(this.sessionId, view, png);
        this.pendingFor(view).mask = upload.mask;
        return upload.mask;
    }
    async attachImage(view, png) {
        const upload = await this.api.uploadImage(this.sessionId, view, png);
        this.pendingFor(view).image = upload.image;
        return upload.image;
    }
    /** Run one progressive step with the staged mask/image for the view. */
    async runStep(view, options = {}) {
        const refs = this.pendingFor(view);
        if (!refs.mask)
            throw new Error(`no mask staged for view ${view}`);
        if (!refs.image)
            throw new Error(`no reference image staged for view ${view}`);
        this.busy = true;
        try {
            const result = await this.api.step(this.sessionId, {
                view,
                mask: refs.mask,
                image: refs.image,
                ...options,
            });
            const entry = {
                step: result.step,
                view,
                report: result.report,
                stateHash: result.state_hash,
            };
            this.history.push(entry);
            await this.refresh();
            return entry;
        }
        finally {
            this.busy = false;
        }
    }
    async undo() {
        this.busy = true;
        try {
            await this.api.undo(this.sessionId);
            this.history.pop();
            await this.refresh();
        }
        finally {
            this.busy = false;
        }
    }
}
