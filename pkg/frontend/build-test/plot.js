/** Scaling helpers for the loss-curve plot (pure math; canvas draws it). */
export function lossPolyline(losses, width, height, margin = 4) {
    if (losses.length === 0)
        return { points: [], yMin: 0, yMax: 1 };
    let yMin = Math.min(...losses);
    let yMax = Math.max(...losses);
    if (yMax - yMin < 1e-12) {
        yMax = yMin + 1e-12;
    }
    const innerW = width - 2 * margin;
    const innerH = height - 2 * margin;
    const denomX = Math.max(losses.length - 1, 1);
    const points = losses.map((value, i) => [
        margin + (i / denomX) * innerW,
        margin + (1 - (value - yMin) / (yMax - yMin)) * innerH,
    ]);
    return { points, yMin, yMax };
}
export function formatLoss(value) {
    if (value === 0)
        return "0";
    if (value >= 0.01)
        return value.toFixed(4);
    return value.toExponential(2);
}
