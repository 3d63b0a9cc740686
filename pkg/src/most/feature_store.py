"""Binary container for per-image token feature grids (MOSTFEAT v1).

The format decouples the localization pipeline from any deep-learning
runtime: an extractor writes one ``.mfeat`` file per image and the pipeline
only ever reads these files.

Layout (all integers and floats little-endian):

===========  =======================================================
bytes 0-7    ASCII magic ``MOSTFEAT``
bytes 8-35   seven uint32 words: version(=1), grid_h, grid_w, dim,
             patch, img_h, img_w
bytes 36-    grid_h * grid_w * dim float32 values, token-major
             (row-major over the grid), then feature dimension
===========  =======================================================

Stored bytes are canonical: writing a map read from disk reproduces the
input bit for bit.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import BinaryIO

import numpy as np

MAGIC = b"MOSTFEAT"
VERSION = 1
_HEADER = struct.Struct("<7I")


class FeatureStoreError(ValueError):
    """Raised on malformed MOSTFEAT data; ``code`` identifies the failure.

    Codes: ``invalid_map``, ``bad_magic``, ``bad_version``, ``truncated``,
    ``non_finite``, ``trailing_data``.
    """

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class FeatureMap:
    """A grid of d-dimensional patch tokens plus the image geometry.

    ``data`` holds one row per token (row-major over the grid), float32.
    Class/register tokens are the extractor's problem; only the
    ``grid_h * grid_w`` patch tokens ever appear here.
    """

    grid_h: int
    grid_w: int
    dim: int
    patch: int
    img_h: int
    img_w: int
    data: np.ndarray

    @property
    def n_tokens(self) -> int:
        return self.grid_h * self.grid_w

    def grid(self) -> np.ndarray:
        """Return ``data`` reshaped to (grid_h, grid_w, dim)."""
        return self.data.reshape(self.grid_h, self.grid_w, self.dim)


def validate(fmap: FeatureMap) -> list[str]:
    """Return a list of invariant violations; empty means the map is valid.

    Diagnostic only, never raises.
    """
    out: list[str] = []
    if fmap.grid_h < 1:
        out.append("grid_h must be >= 1")
    if fmap.grid_w < 1:
        out.append("grid_w must be >= 1")
    if fmap.dim < 1:
        out.append("dim must be >= 1")
    if fmap.patch < 1:
        out.append("patch must be >= 1")
    if fmap.img_h < 1:
        out.append("img_h must be >= 1")
    if fmap.img_w < 1:
        out.append("img_w must be >= 1")
    if out:
        return out

    data = np.asarray(fmap.data)
    expected = (fmap.grid_h * fmap.grid_w, fmap.dim)
    if data.shape != expected:
        out.append(f"data shape {data.shape} does not match {expected}")
        return out

    # Grid must cover the image to within one patch of slack on each side.
    for name, cells, pixels in (
        ("height", fmap.grid_h, fmap.img_h),
        ("width", fmap.grid_w, fmap.img_w),
    ):
        span = cells * fmap.patch
        if span < pixels - fmap.patch + 1 or span > pixels + fmap.patch:
            out.append(
                f"grid {name} {cells} x patch {fmap.patch} = {span} does not "
                f"cover image {name} {pixels} within one patch"
            )

    finite = np.isfinite(data)
    if not finite.all():
        bad = np.nonzero(~finite.all(axis=1))[0]
        for k in bad[:8]:
            out.append(f"non-finite value at token {int(k)}")
        if len(bad) > 8:
            out.append(f"... and {len(bad) - 8} more tokens with non-finite values")
    return out


def write_feature_map(fmap: FeatureMap, sink: BinaryIO) -> None:
    """Serialize ``fmap`` to ``sink`` in the MOSTFEAT v1 layout, bit-exact.

    Rejects invalid maps before any bytes are written.
    """
    violations = validate(fmap)
    if violations:
        raise FeatureStoreError("invalid_map", "; ".join(violations))
    payload = np.ascontiguousarray(fmap.data, dtype="<f4")
    sink.write(MAGIC)
    sink.write(
        _HEADER.pack(
            VERSION, fmap.grid_h, fmap.grid_w, fmap.dim,
            fmap.patch, fmap.img_h, fmap.img_w,
        )
    )
    sink.write(payload.tobytes())


def read_feature_map(source: BinaryIO) -> FeatureMap:
    """Parse one MOSTFEAT v1 map from ``source``.

    The returned map always satisfies :func:`validate`; malformed input
    raises :class:`FeatureStoreError` with a distinct ``code``.
    """
    magic = source.read(len(MAGIC))
    if magic != MAGIC:
        raise FeatureStoreError("bad_magic", f"bad magic {magic!r}")
    header = source.read(_HEADER.size)
    if len(header) < _HEADER.size:
        raise FeatureStoreError("truncated", "truncated header")
    version, grid_h, grid_w, dim, patch, img_h, img_w = _HEADER.unpack(header)
    if version != VERSION:
        raise FeatureStoreError("bad_version", f"unsupported version {version}")

    n_values = grid_h * grid_w * dim
    raw = source.read(4 * n_values)
    if len(raw) < 4 * n_values:
        raise FeatureStoreError(
            "truncated",
            f"truncated payload: expected {4 * n_values} bytes, got {len(raw)}",
        )
    trailing = source.read(1)
    if trailing:
        raise FeatureStoreError("trailing_data", "trailing bytes after payload")

    data = np.frombuffer(raw, dtype="<f4").reshape(grid_h * grid_w, dim).copy()
    fmap = FeatureMap(grid_h, grid_w, dim, patch, img_h, img_w, data)
    violations = validate(fmap)
    if violations:
        non_finite = [v for v in violations if v.startswith("non-finite")]
        code = "non_finite" if non_finite else "invalid_map"
        raise FeatureStoreError(code, "; ".join(violations))
    return fmap


def write_feature_file(fmap: FeatureMap, path) -> None:
    with open(path, "wb") as fh:
        write_feature_map(fmap, fh)


def read_feature_file(path) -> FeatureMap:
    with open(path, "rb") as fh:
        return read_feature_map(fh)
