/** Orbitable WebGL viewer for per-step point clouds, plus a before/after
 * novel-view slider backed by server renders. */
import { multiply, pan, perspectiveMatrix, rotate, viewMatrix, zoom, } from "../orbit.js";
import { parsePointCloudPly } from "../ply.js";
const VERT = `
attribute vec3 position;
attribute vec3 color;
uniform mat4 mvp;
varying vec3 vColor;
void main() {
  gl_Position = mvp * vec4(position, 1.0);
  gl_PointSize = 2.0;
  vColor = color;
}`;
const FRAG = `
precision mediump float;
varying vec3 vColor;
void main() { gl_FragColor = vec4(vColor, 1.0); }`;
export class CloudInspector {
    api;
    store;
    canvas;
    gl;
    cloud = null;
    orbit = {
        target: [0, 0, 0], distance: 3, yaw: 0.5, pitch: 0.3,
    };
    buffers = null;
    program = null;
    status;
    constructor(root, api, store) {
        this.api = api;
        this.store = store;
        this.canvas = document.createElement("canvas");
        this.canvas.width = 420;
        this.canvas.height = 320;
        this.canvas.className = "cloud";
        this.status = document.createElement("div");
        this.status.className = "status";
        root.append(this.canvas, this.status);
        this.gl = this.canvas.getContext("webgl");
        if (this.gl)
            this.setupGl(this.gl);
        else
            this.status.textContent = "WebGL unavailable; cloud view disabled";
        let dragging = false;
        let lastXY = [0, 0];
        this.canvas.addEventListener("pointerdown", (e) => {
            dragging = true;
            lastXY = [e.clientX, e.clientY];
        });
        this.canvas.addEventListener("pointermove", (e) => {
            if (!dragging)
                return;
            const dx = (e.clientX - lastXY[0]) / 120;
            const dy = (e.clientY - lastXY[1]) / 120;
            lastXY = [e.clientX, e.clientY];
            this.orbit = e.shiftKey
                ? pan(this.orbit, -dx * 0.3, dy * 0.3)
                : rotate(this.orbit, dx, dy);
            this.draw();
        });
        this.canvas.addEventListener("pointerup", () => (dragging = false));
        this.canvas.addEventListener("wheel", (e) => {
            e.preventDefault();
            this.orbit = zoom(this.orbit, e.deltaY > 0 ? 1.1 : 0.9);
            this.draw();
        });
    }
    async showStep(step) {
        try {
            const text = await this.api.pointcloud(this.store.sessionId, step);
            this.cloud = parsePointCloudPly(text);
        }
        catch (err) {
            this.status.textContent = `no cloud for step ${step}: ${err.message}`;
            return;
        }
        this.orbit = {
            target: this.cloud.center,
            distance: this.cloud.radius * 3,
            yaw: 0.5,
            pitch: 0.3,
        };
        this.status.textContent = `step ${step}: ${this.cloud.count} points`;
        this.uploadBuffers();
        this.draw();
    }
    setupGl(gl) {
        const compile = (kind, source) => {
            const shader = gl.createShader(kind);
            gl.shaderSource(shader, source);
            gl.compileShader(shader);
            return shader;
        };
        const program = gl.createProgram();
        gl.attachShader(program, compile(gl.VERTEX_SHADER, VERT));
        gl.attachShader(program, compile(gl.FRAGMENT_SHADER, FRAG));
        gl.linkProgram(program);
        this.program = program;
        gl.enable(gl.DEPTH_TEST);
        gl.clearColor(0.07, 0.08, 0.1, 1);
    }
    uploadBuffers() {
        const gl = this.gl;
        if (!gl || !this.cloud)
            return;
        const position = gl.createBuffer();
        gl.bindBuffer(gl.ARRAY_BUFFER, position);
        gl.bufferData(gl.ARRAY_BUFFER, this.cloud.positions, gl.STATIC_DRAW);
        const color = gl.createBuffer();
        gl.bindBuffer(gl.ARRAY_BUFFER, color);
        gl.bufferData(gl.ARRAY_BUFFER, this.cloud.colors, gl.STATIC_DRAW);
        this.buffers = { position, color };
    }
    draw() {
        const gl = this.gl;
        if (!gl || !this.cloud || !this.buffers || !this.program)
            return;
        gl.viewport(0, 0, this.canvas.width, this.canvas.height);
        gl.clear(gl.COLOR_BUFFER_BIT | gl.DEPTH_BUFFER_BIT);
        gl.useProgram(this.program);
        const mvp = multiply(perspectiveMatrix(0.9, this.canvas.width / this.canvas.height, this.cloud.radius / 100, this.cloud.radius * 20), viewMatrix(this.orbit));
        gl.uniformMatrix4fv(gl.getUniformLocation(this.program, "mvp"), false, mvp);
        for (const [name, buffer, size] of [
            ["position", this.buffers.position, 3],
            ["color", this.buffers.color, 3],
        ]) {
            const loc = gl.getAttribLocation(this.program, name);
            gl.bindBuffer(gl.ARRAY_BUFFER, buffer);
            gl.enableVertexAttribArray(loc);
            gl.vertexAttribPointer(loc, size, gl.FLOAT, false, 0, 0);
        }
        gl.drawArrays(gl.POINTS, 0, this.cloud.count);
    }
}
/** Before/after comparison of the same novel view across two state hashes. */
export class BeforeAfterSlider {
    api;
    store;
    before;
    after;
    slider;
    constructor(root, api, store) {
        this.api = api;
        this.store = store;
        const frame = document.createElement("div");
        frame.className = "compare";
        this.before = document.createElement("img");
        this.after = document.createElement("img");
        this.after.className = "overlay";
        this.slider = document.createElement("input");
        this.slider.type = "range";
        this.slider.min = "0";
        this.slider.max = "100";
        this.slider.value = "50";
        this.slider.addEventListener("input", () => {
            this.after.style.clipPath = `inset(0 ${100 - Number(this.slider.value)}% 0 0)`;
        });
        frame.append(this.before, this.after);
        root.append(frame, this.slider);
    }
    show(view, beforeHash, afterHash) {
        this.before.src = this.api.renderUrl(this.store.sessionId, view, "color", beforeHash);
        this.after.src = this.api.renderUrl(this.store.sessionId, view, "color", afterHash);
        this.after.style.clipPath = "inset(0 50% 0 0)";
    }
}
