"""External denoiser/codec backend over a subprocess tensor protocol.

Real diffusion weights live in another process (any runtime, any language);
this side exchanges raw float32 tensors framed as one JSON header line
``{"shape": [c, h, w], "t": <int>, "role": "denoise"|"encode"|"decode"}``
followed by the row-major little-endian payload on the child's stdin, with
the response framed the same way (``{"shape": [...]}`` + payload, or
``{"error": "..."}``) on its stdout.
"""

from __future__ import annotations

import json
import subprocess
from typing import Protocol, runtime_checkable

import numpy as np

from ..errors import BackendError
from .latent import LatentStack


@runtime_checkable
class Denoiser(Protocol):
    """Predicts the noise component of the noisy depth latent."""

    def predict_noise(self, stack: LatentStack, t: int) -> np.ndarray: ...


class TensorProcess:
    """Owns the child process and speaks the framed-tensor protocol.

    Not thread-safe: requests are strictly serialized by the caller (one
    request in flight per instance).
    """

    def __init__(self, command: list[str]):
        self.command = list(command)
        try:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
            )
        except OSError as e:
            raise BackendError(f"cannot start backend {command!r}: {e}") from e

    def request(self, role: str, tensor: np.ndarray, t: int = 0) -> np.ndarray:
        data = np.ascontiguousarray(tensor, dtype="<f4")
        header = json.dumps({"shape": list(data.shape), "t": int(t), "role": role})
        proc = self._proc
        if proc.poll() is not None:
            raise BackendError(f"backend process exited with {proc.returncode}")
        try:
            proc.stdin.write(header.encode() + b"\n")
            proc.stdin.write(data.tobytes())
            proc.stdin.flush()
            reply_line = proc.stdout.readline()
            if not reply_line:
                raise BackendError("backend closed its stdout")
            reply = json.loads(reply_line)
            if "error" in reply:
                raise BackendError(f"backend error: {reply['error']}")
            shape = tuple(int(s) for s in reply["shape"])
            count = int(np.prod(shape)) * 4
            payload = proc.stdout.read(count)
            if len(payload) != count:
                raise BackendError("backend reply payload truncated")
        except (BrokenPipeError, json.JSONDecodeError, KeyError, ValueError) as e:
            raise BackendError(f"backend protocol failure: {e}") from e
        return np.frombuffer(payload, dtype="<f4").reshape(shape).astype(np.float64)

    def close(self) -> None:
        proc = self._proc
        if proc.poll() is None:
            proc.stdin.close()
            try:
                proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                proc.kill()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class ExternalDenoiser:
    """Denoiser backed by a TensorProcess: sends the 13-channel stack."""

    def __init__(self, process: TensorProcess):
        self.process = process

    def predict_noise(self, stack: LatentStack, t: int) -> np.ndarray:
        return self.process.request("denoise", stack.channels(), t)


class ExternalCodec:
    """Latent codec backed by a TensorProcess (e.g. a real VAE, factor 8)."""

    def __init__(self, process: TensorProcess, downsample_factor: int = 8):
        self.process = process
        self.downsample_factor = downsample_factor

    def encode(self, image: np.ndarray) -> np.ndarray:
        chw = np.asarray(image, dtype=np.float64).transpose(2, 0, 1)
        return self.process.request("encode", chw)

    def decode(self, latent: np.ndarray) -> np.ndarray:
        out = self.process.request("decode", latent)
        return out.transpose(1, 2, 0)
