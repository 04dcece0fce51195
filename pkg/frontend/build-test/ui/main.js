/** Studio entry point: session form, panel wiring, refresh discipline. */
import { StudioApi } from "../api.js";
import { SessionStore } from "../state.js";
import { CloudInspector, BeforeAfterSlider } from "./cloud.js";
import { MaskPainterPanel, ReferenceUploader } from "./painter.js";
import { ProgressivePanel, StepRunner } from "./steps.js";
import { RenderStrip, ViewBrowser } from "./views.js";
function el(id) {
    const node = document.getElementById(id);
    if (!node)
        throw new Error(`missing #${id}`);
    return node;
}
export function boot() {
    const api = new StudioApi("");
    const store = new SessionStore(api);
    const browser = new ViewBrowser(el("views"), api, store);
    const strip = new RenderStrip(el("renders"), api, store);
    const painter = new MaskPainterPanel(el("painter"), api, store);
    const uploader = new ReferenceUploader(el("uploader"), store);
    const runner = new StepRunner(el("runner"), store);
    const panel = new ProgressivePanel(el("history"), store);
    const cloud = new CloudInspector(el("cloud"), api, store);
    const compare = new BeforeAfterSlider(el("compare"), api, store);
    let currentView = null;
    let hashBeforeStep = null;
    browser.onSelect = (view) => {
        currentView = view;
        strip.show(view.view);
        painter.setView(view);
        uploader.setView(view);
        runner.setView(view);
    };
    painter.onMaskUploaded = () => runner.refreshEnabled();
    uploader.onImageUploaded = () => runner.refreshEnabled();
    runner.onStepDone = (entry) => {
        panel.render();
        void browser.reload();
        if (currentView) {
            strip.show(currentView.view);
            if (hashBeforeStep) {
                compare.show(currentView.view, hashBeforeStep, entry.stateHash);
            }
            void cloud.showStep(entry.step);
        }
        hashBeforeStep = entry.stateHash;
    };
    panel.onChanged = () => {
        void browser.reload();
        if (currentView)
            strip.show(currentView.view);
    };
    const form = el("session-form");
    form.addEventListener("submit", (e) => {
        e.preventDefault();
        const scene = el("scene-path").value;
        const cameras = el("cameras-path").value;
        void (async () => {
            try {
                const info = await store.open(scene, cameras);
                hashBeforeStep = info.state_hash;
                el("session-label").textContent =
                    `session ${info.session} - ${info.gaussians} gaussians`;
                await browser.reload();
                panel.render();
            }
            catch (err) {
                el("session-label").textContent = `failed: ${err.message}`;
            }
        })();
    });
}
boot();
