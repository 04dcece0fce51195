"""Image, mask, and depth-map file I/O.

Color images are 8-bit PNG, treated as floats in [0, 1] with no color-space
conversion. Masks are single-channel 8-bit PNG, nonzero = masked. Depth maps
travel as 32-bit float TIFF, or as a raw format: one JSON header line
``{"width": W, "height": H, "dtype": "f32"}`` followed by row-major
little-endian float32 samples.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import tifffile
from PIL import Image

from .depthmap import DepthMap
from .errors import ParseError
from .masks import MaskImage


def read_image(path: str | Path) -> np.ndarray:
    """PNG/JPEG file to (H, W, 3) float64 in [0, 1]."""
    img = Image.open(path).convert("RGB")
    return np.asarray(img, dtype=np.float64) / 255.0


def write_image(image: np.ndarray, path: str | Path) -> None:
    """(H, W, 3) or (H, W) floats in [0, 1] to an 8-bit PNG."""
    arr = np.clip(np.asarray(image), 0.0, 1.0)
    data = np.round(arr * 255.0).astype(np.uint8)
    Image.fromarray(data).save(path)


def image_to_png_bytes(image: np.ndarray) -> bytes:
    import io

    arr = np.clip(np.asarray(image), 0.0, 1.0)
    data = np.round(arr * 255.0).astype(np.uint8)
    buf = io.BytesIO()
    Image.fromarray(data).save(buf, format="PNG")
    return buf.getvalue()


def read_mask(path: str | Path) -> MaskImage:
    img = Image.open(path).convert("L")
    return MaskImage(np.asarray(img) > 0)


def mask_from_png_bytes(data: bytes) -> MaskImage:
    import io

    img = Image.open(io.BytesIO(data)).convert("L")
    return MaskImage(np.asarray(img) > 0)


def write_mask(mask: MaskImage, path: str | Path) -> None:
    Image.fromarray(mask.bits.astype(np.uint8) * 255).save(path)


def mask_to_png_bytes(mask: MaskImage) -> bytes:
    import io

    buf = io.BytesIO()
    Image.fromarray(mask.bits.astype(np.uint8) * 255).save(buf, format="PNG")
    return buf.getvalue()


def write_depth(dm: DepthMap, path: str | Path) -> None:
    """Write depth to float TIFF (.tif/.tiff) or the raw format (other suffixes).

    Invalid pixels are stored as NaN so validity survives the round trip.
    """
    path = Path(path)
    data = np.where(dm.valid, dm.depth, np.nan).astype(np.float32)
    if path.suffix.lower() in (".tif", ".tiff"):
        tifffile.imwrite(path, data)
        return
    header = json.dumps(
        {"width": dm.width, "height": dm.height, "dtype": "f32"}
    ).encode() + b"\n"
    path.write_bytes(header + data.astype("<f4").tobytes())


def read_depth(path: str | Path) -> DepthMap:
    path = Path(path)
    if path.suffix.lower() in (".tif", ".tiff"):
        data = np.asarray(tifffile.imread(path), dtype=np.float64)
    else:
        raw = path.read_bytes()
        nl = raw.find(b"\n")
        if nl < 0:
            raise ParseError("raw depth file missing JSON header line", offset=0)
        try:
            header = json.loads(raw[:nl])
            w, h = int(header["width"]), int(header["height"])
            if header.get("dtype", "f32") != "f32":
                raise ParseError(f"unsupported depth dtype {header['dtype']!r}", offset=0)
        except (ValueError, KeyError) as e:
            raise ParseError(f"bad raw depth header: {e}", offset=0) from e
        body = raw[nl + 1 :]
        if len(body) < 4 * w * h:
            raise ParseError("raw depth body truncated", offset=len(raw))
        data = np.frombuffer(body, dtype="<f4", count=w * h).reshape(h, w).astype(np.float64)
    valid = np.isfinite(data)
    return DepthMap(np.where(valid, data, 0.0), valid)


def depth_to_tiff_bytes(dm: DepthMap) -> bytes:
    import io

    data = np.where(dm.valid, dm.depth, np.nan).astype(np.float32)
    buf = io.BytesIO()
    tifffile.imwrite(buf, data)
    return buf.getvalue()
