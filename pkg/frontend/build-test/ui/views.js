/** View browser: thumbnail grid; selecting a view loads its renders. */
export class ViewBrowser {
    root;
    api;
    store;
    onSelect = () => { };
    views = [];
    selected = null;
    constructor(root, api, store) {
        this.root = root;
        this.api = api;
        this.store = store;
    }
    async reload() {
        const { views } = await this.api.views(this.store.sessionId, 64);
        this.views = views;
        this.render();
    }
    render() {
        this.root.innerHTML = "";
        for (const view of this.views) {
            const cell = document.createElement("button");
            cell.className = "thumb" + (this.selected?.view === view.view ? " sel" : "");
            const img = document.createElement("img");
            img.src = view.thumbnail;
            img.alt = view.view;
            const label = document.createElement("span");
            label.textContent = `${view.view} (${view.width}×${view.height})`;
            cell.append(img, label);
            cell.addEventListener("click", () => {
                this.selected = view;
                this.render();
                this.onSelect(view);
            });
            this.root.appendChild(cell);
        }
    }
}
/** Color/depth/alpha render strip for the selected view. */
export class RenderStrip {
    root;
    api;
    store;
    constructor(root, api, store) {
        this.root = root;
        this.api = api;
        this.store = store;
    }
    show(view) {
        this.root.innerHTML = "";
        const hash = this.store.stateHash ?? "";
        for (const mode of ["color", "alpha"]) {
            const figure = document.createElement("figure");
            const img = document.createElement("img");
            img.src = this.api.renderUrl(this.store.sessionId, view, mode, hash);
            img.className = "render";
            const caption = document.createElement("figcaption");
            caption.textContent = mode;
            figure.append(img, caption);
            this.root.appendChild(figure);
        }
        const depth = document.createElement("a");
        depth.href = this.api.renderUrl(this.store.sessionId, view, "depth", hash);
        depth.textContent = "depth (float TIFF)";
        depth.setAttribute("download", `${view}-depth.tiff`);
        this.root.appendChild(depth);
    }
}
