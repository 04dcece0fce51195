/** Generic polling helper for long-running server work. */
const sleep = (ms) => new Promise((resolve) => setTimeout(resolve, ms));
/**
 * Repeatedly call `probe` until `isDone` accepts its result. Resolves with
 * the accepted value; rejects on timeout or if the probe throws.
 */
export async function pollUntil(probe, { intervalMs = 500, timeoutMs = 120_000, isDone }) {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
        const value = await probe();
        if (isDone(value))
            return value;
        if (Date.now() >= deadline) {
            throw new Error(`poll timed out after ${timeoutMs} ms`);
        }
        await sleep(intervalMs);
    }
}
