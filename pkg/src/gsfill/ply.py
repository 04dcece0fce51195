"""Binary PLY I/O for Gaussian-splat scenes.

Reads and writes the standard splat vertex layout: ``x y z``, ``f_dc_0..2``,
``f_rest_*`` (channel-major, 3*(K-1) properties), ``opacity`` (logit),
``scale_0..2`` (log), ``rot_0..3`` (quaternion wxyz). Files are
binary-little-endian with float32 properties; unknown extra properties are
skipped on load.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import ParseError, SchemaError
from .scene import GaussianScene, sh_coeff_count

_PLY_DTYPES = {
    "float": ("<f4", 4),
    "float32": ("<f4", 4),
    "double": ("<f8", 8),
    "float64": ("<f8", 8),
    "uchar": ("<u1", 1),
    "uint8": ("<u1", 1),
    "char": ("<i1", 1),
    "int8": ("<i1", 1),
    "short": ("<i2", 2),
    "int16": ("<i2", 2),
    "ushort": ("<u2", 2),
    "uint16": ("<u2", 2),
    "int": ("<i4", 4),
    "int32": ("<i4", 4),
    "uint": ("<u4", 4),
    "uint32": ("<u4", 4),
}


def _parse_header(data: bytes):
    """Returns (vertex_count, [(name, numpy dtype, size)], body_offset)."""
    if not data.startswith(b"ply"):
        raise ParseError("not a PLY file (missing 'ply' magic)", offset=0)
    end = data.find(b"end_header\n")
    if end < 0:
        raise ParseError("unterminated PLY header", offset=len(data))
    body_offset = end + len(b"end_header\n")
    header = data[:end].decode("ascii", errors="replace")

    vertex_count = None
    props: list[tuple[str, str, int]] = []
    in_vertex = False
    offset = 0
    for line in header.splitlines():
        stripped = line.strip()
        line_offset = offset
        offset += len(line) + 1
        if not stripped or stripped.startswith("comment"):
            continue
        tokens = stripped.split()
        if tokens[0] == "format":
            if tokens[1] != "binary_little_endian":
                raise ParseError(
                    f"unsupported PLY format {tokens[1]!r}", offset=line_offset
                )
        elif tokens[0] == "element":
            in_vertex = tokens[1] == "vertex"
            if in_vertex:
                try:
                    vertex_count = int(tokens[2])
                except (IndexError, ValueError):
                    raise ParseError("malformed element line", offset=line_offset)
        elif tokens[0] == "property" and in_vertex:
            if tokens[1] == "list":
                raise ParseError("list properties not supported", offset=line_offset)
            if tokens[1] not in _PLY_DTYPES:
                raise ParseError(
                    f"unknown property type {tokens[1]!r}", offset=line_offset
                )
            dt, size = _PLY_DTYPES[tokens[1]]
            props.append((tokens[2], dt, size))
    if vertex_count is None:
        raise ParseError("no vertex element in header", offset=body_offset)
    return vertex_count, props, body_offset


def load_scene_ply(path: str | Path) -> GaussianScene:
    """Load a Gaussian scene from a binary splat PLY file."""
    data = Path(path).read_bytes()
    vertex_count, props, body_offset = _parse_header(data)

    names = [p[0] for p in props]
    required = ["x", "y", "z", "opacity", "scale_0", "scale_1", "scale_2",
                "rot_0", "rot_1", "rot_2", "rot_3", "f_dc_0", "f_dc_1", "f_dc_2"]
    for name in required:
        if name not in names:
            raise SchemaError(f"PLY vertex element missing property {name!r}")

    rest_count = sum(1 for n in names if n.startswith("f_rest_"))
    sh_degree = _degree_from_rest(rest_count)

    dtype = np.dtype([(name, dt) for name, dt, _ in props])
    expected = body_offset + vertex_count * dtype.itemsize
    if len(data) < expected:
        raise ParseError(
            f"truncated body: expected {vertex_count} vertices "
            f"({expected - body_offset} bytes)",
            offset=len(data),
        )
    verts = np.frombuffer(data, dtype=dtype, count=vertex_count, offset=body_offset)

    def col(name):
        return np.asarray(verts[name], dtype=np.float64)

    n = vertex_count
    k = sh_coeff_count(sh_degree)
    sh = np.zeros((n, k, 3))
    sh[:, 0, 0] = col("f_dc_0")
    sh[:, 0, 1] = col("f_dc_1")
    sh[:, 0, 2] = col("f_dc_2")
    for ch in range(3):
        for coeff in range(1, k):
            sh[:, coeff, ch] = col(f"f_rest_{ch * (k - 1) + (coeff - 1)}")

    return GaussianScene(
        positions=np.stack([col("x"), col("y"), col("z")], axis=1),
        rotations=np.stack([col(f"rot_{i}") for i in range(4)], axis=1),
        log_scales=np.stack([col(f"scale_{i}") for i in range(3)], axis=1),
        opacities=col("opacity"),
        sh=sh,
        sh_degree=sh_degree,
    )


def _degree_from_rest(rest_count: int) -> int:
    for degree in range(4):
        if rest_count == 3 * (sh_coeff_count(degree) - 1):
            return degree
    raise SchemaError(f"cannot infer SH degree from {rest_count} f_rest properties")


def save_scene_ply(scene: GaussianScene, path: str | Path) -> None:
    """Write a scene as a binary splat PLY (float32 properties)."""
    k = sh_coeff_count(scene.sh_degree)
    names = ["x", "y", "z", "f_dc_0", "f_dc_1", "f_dc_2"]
    names += [f"f_rest_{i}" for i in range(3 * (k - 1))]
    names += ["opacity", "scale_0", "scale_1", "scale_2",
              "rot_0", "rot_1", "rot_2", "rot_3"]

    n = len(scene)
    out = np.empty(n, dtype=np.dtype([(name, "<f4") for name in names]))
    out["x"], out["y"], out["z"] = scene.positions.T.astype(np.float32)
    for ch in range(3):
        out[f"f_dc_{ch}"] = scene.sh[:, 0, ch].astype(np.float32)
        for coeff in range(1, k):
            out[f"f_rest_{ch * (k - 1) + (coeff - 1)}"] = scene.sh[:, coeff, ch].astype(
                np.float32
            )
    out["opacity"] = scene.opacities.astype(np.float32)
    for i in range(3):
        out[f"scale_{i}"] = scene.log_scales[:, i].astype(np.float32)
    for i in range(4):
        out[f"rot_{i}"] = scene.rotations[:, i].astype(np.float32)

    header = ["ply", "format binary_little_endian 1.0", f"element vertex {n}"]
    header += [f"property float {name}" for name in names]
    header += ["end_header", ""]
    try:
        with open(path, "wb") as f:
            f.write("\n".join(header).encode("ascii"))
            f.write(out.tobytes())
    except OSError as e:
        raise IOError(f"cannot write PLY to {path}: {e}") from e
