import assert from "node:assert/strict";
import { test } from "node:test";
import { MaskPainter, binaryEqual, overlayPixels } from "./mask.js";
test("brush stamp marks a disk after thresholding", () => {
    const painter = new MaskPainter(32, 32);
    painter.stamp(16, 16, 8);
    const bits = painter.threshold();
    assert.equal(bits[16 * 32 + 16], 255); // center
    assert.equal(bits[16 * 32 + 19], 255); // inside half-radius
    assert.equal(bits[0], 0); // far corner untouched
    // threshold at 0.5 with linear falloff sets ~r/2 pixels
    const onAxis = bits.slice(16 * 32, 17 * 32);
    const painted = onAxis.reduce((acc, v) => acc + (v > 0 ? 1 : 0), 0);
    assert.ok(painted >= 7 && painted <= 11, `painted row width ${painted}`);
});
test("eraser removes the brush core", () => {
    const painter = new MaskPainter(16, 16);
    painter.stamp(8, 8, 6);
    assert.ok(painter.maskedCount() > 0);
    painter.stamp(8, 8, 12, "eraser");
    assert.equal(painter.maskedCount(), 0);
});
test("line strokes leave no gaps", () => {
    const painter = new MaskPainter(64, 16);
    painter.line(4, 8, 60, 8, 3);
    const bits = painter.threshold();
    for (let x = 5; x <= 59; x++) {
        assert.equal(bits[8 * 64 + x], 255, `gap at x=${x}`);
    }
});
test("painted mask survives a round trip through stored bytes", () => {
    // mirrors the studio flow with a byte-faithful transport: export the
    // thresholded mask, "upload" it, re-import the served copy
    const painter = new MaskPainter(24, 24);
    painter.stamp(6, 6, 4);
    painter.line(10, 4, 20, 20, 3);
    const exported = painter.threshold();
    const serverCopy = new Uint8Array(exported); // what the server stored
    const reimport = new MaskPainter(24, 24);
    reimport.loadBinary(serverCopy);
    assert.ok(binaryEqual(reimport.threshold(), exported));
});
test("clear resets everything", () => {
    const painter = new MaskPainter(8, 8);
    painter.stamp(4, 4, 3);
    painter.clear();
    assert.equal(painter.maskedCount(), 0);
});
test("loadBinary validates the payload size", () => {
    const painter = new MaskPainter(4, 4);
    assert.throws(() => painter.loadBinary(new Uint8Array(9)), RangeError);
});
test("overlay pixels are RGBA with alpha only where masked", () => {
    const bits = new Uint8Array([0, 255, 0, 255]);
    const rgba = overlayPixels(bits);
    assert.equal(rgba.length, 16);
    assert.equal(rgba[3], 0);
    assert.equal(rgba[7], 128);
});
test("bad dimensions are rejected", () => {
    assert.throws(() => new MaskPainter(0, 5), RangeError);
});
