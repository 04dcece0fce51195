/** View browser: thumbnail grid; selecting a view loads its renders. */

import { StudioApi, ViewInfo } from "../api.js";
import { SessionStore } from "../state.js";

export class ViewBrowser {
  onSelect: (view: ViewInfo) => void = () => {};
  private views: ViewInfo[] = [];
  selected: ViewInfo | null = null;

  constructor(
    private root: HTMLElement,
    private api: StudioApi,
    private store: SessionStore,
  ) {}

  async reload(): Promise<void> {
    const { views } = await this.api.views(this.store.sessionId, 64);
    this.views = views;
    this.render();
  }

  private render(): void {
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
  constructor(
    private root: HTMLElement,
    private api: StudioApi,
    private store: SessionStore,
  ) {}

  show(view: string): void {
    this.root.innerHTML = "";
    const hash = this.store.stateHash ?? "";
    for (const mode of ["color", "alpha"] as const) {
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
