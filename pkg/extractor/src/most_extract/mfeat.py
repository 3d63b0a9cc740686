"""MOSTFEAT v1 writer/reader.

Implemented from the published byte layout so this package stays decoupled
from the core library: ASCII magic ``MOSTFEAT``; seven little-endian uint32
words (version=1, grid_h, grid_w, dim, patch, img_h, img_w); then
grid_h*grid_w*dim little-endian float32 values, token-major then dimension.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"MOSTFEAT"
VERSION = 1
_HEADER = struct.Struct("<7I")


def write_mfeat(
    path,
    data: np.ndarray,
    grid_h: int,
    grid_w: int,
    patch: int,
    img_h: int,
    img_w: int,
) -> None:
    data = np.ascontiguousarray(data, dtype="<f4")
    if data.shape[0] != grid_h * grid_w:
        raise ValueError(f"{data.shape[0]} tokens for a {grid_h}x{grid_w} grid")
    if not np.isfinite(data).all():
        raise ValueError("non-finite feature values")
    dim = data.shape[1]
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(_HEADER.pack(VERSION, grid_h, grid_w, dim, patch, img_h, img_w))
        fh.write(data.tobytes())


def read_mfeat(path) -> tuple[dict, np.ndarray]:
    raw = Path(path).read_bytes()
    if raw[:8] != MAGIC:
        raise ValueError("bad magic")
    version, grid_h, grid_w, dim, patch, img_h, img_w = _HEADER.unpack(raw[8:36])
    if version != VERSION:
        raise ValueError(f"unsupported version {version}")
    expected = 36 + 4 * grid_h * grid_w * dim
    if len(raw) != expected:
        raise ValueError(f"expected {expected} bytes, got {len(raw)}")
    data = np.frombuffer(raw[36:], dtype="<f4").reshape(grid_h * grid_w, dim)
    header = {
        "grid_h": grid_h, "grid_w": grid_w, "dim": dim,
        "patch": patch, "img_h": img_h, "img_w": img_w,
    }
    return header, data.copy()
