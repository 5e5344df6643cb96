"""Text point-cloud files and the binary image tensor format.

Image tensor layout (all little-endian)::

    b"GEMB0001"
    u32 H, u32 W, u32 C, u8 has_mask, u8 dtype (1 = float32)
    H*W*C float32 features, row-major, channel-minor
    H*W int32 mask (only if has_mask; -1 marks empty pixels)
    u64 n, then n bytes of UTF-8 JSON (pixel_of_point, collisions, config, seed)
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .types import CloudImage, CollisionRecord, GridEmbedError, PointCloud

MAGIC = b"GEMB0001"
HEADER = struct.Struct("<IIIBB")
DTYPE_F32 = 1


class CloudParseError(GridEmbedError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class TensorFileError(GridEmbedError, ValueError):
    pass


def parse_cloud(text: str) -> PointCloud:
    rows, labels = [], []
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) not in (3, 4):
            raise CloudParseError(f"expected 3 or 4 columns, got {len(parts)}", lineno)
        if width is None:
            width = len(parts)
        elif len(parts) != width:
            raise CloudParseError(
                f"expected {width} columns like the first point, got {len(parts)}", lineno)
        try:
            xyz = [float(v) for v in parts[:3]]
        except ValueError:
            raise CloudParseError(f"bad coordinate in {line!r}", lineno) from None
        if not all(np.isfinite(xyz)):
            raise CloudParseError("non-finite coordinate", lineno)
        rows.append(xyz)
        if width == 4:
            try:
                lab = int(parts[3])
            except ValueError:
                raise CloudParseError(f"label {parts[3]!r} is not an integer", lineno) from None
            if lab < 0:
                raise CloudParseError("labels must be non-negative", lineno)
            labels.append(lab)
    if not rows:
        raise CloudParseError("no points found")
    return PointCloud(np.array(rows), np.array(labels) if width == 4 else None)


def read_cloud(path) -> PointCloud:
    return parse_cloud(Path(path).read_text(encoding="utf-8"))


def write_cloud(path, cloud: PointCloud) -> None:
    lines = []
    for i, p in enumerate(cloud.points):
        cols = [repr(float(v)) for v in p]
        if cloud.has_labels:
            cols.append(str(int(cloud.labels[i])))
        lines.append(" ".join(cols))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _trailer(image: CloudImage) -> bytes:
    meta = dict(image.meta)
    meta["pixel_of_point"] = image.pixel_of_point.tolist()
    meta["collisions"] = [r.to_json() for r in image.collisions]
    return json.dumps(meta, sort_keys=True, separators=(",", ":")).encode("utf-8")


def encode_image(image: CloudImage) -> bytes:
    H, W = image.shape
    C = image.features.shape[2]
    has_mask = image.mask is not None
    out = [MAGIC, HEADER.pack(H, W, C, int(has_mask), DTYPE_F32),
           np.ascontiguousarray(image.features, dtype="<f4").tobytes()]
    if has_mask:
        out.append(np.ascontiguousarray(image.mask, dtype="<i4").tobytes())
    trailer = _trailer(image)
    out.append(struct.pack("<Q", len(trailer)))
    out.append(trailer)
    return b"".join(out)


def decode_image(buf: bytes) -> CloudImage:
    if buf[:8] != MAGIC:
        raise TensorFileError("bad magic; not an image tensor file")
    if len(buf) < 8 + HEADER.size:
        raise TensorFileError("truncated header")
    H, W, C, has_mask, dtype = HEADER.unpack_from(buf, 8)
    if dtype != DTYPE_F32:
        raise TensorFileError(f"unsupported dtype tag {dtype}")
    if has_mask not in (0, 1):
        raise TensorFileError(f"bad has_mask flag {has_mask}")
    pos = 8 + HEADER.size
    nfeat = H * W * C * 4
    nmask = H * W * 4 if has_mask else 0
    if len(buf) < pos + nfeat + nmask + 8:
        raise TensorFileError("file shorter than its header implies")
    features = np.frombuffer(buf, dtype="<f4", count=H * W * C, offset=pos)
    features = features.reshape(H, W, C).astype(np.float32)
    pos += nfeat
    mask = None
    if has_mask:
        mask = np.frombuffer(buf, dtype="<i4", count=H * W, offset=pos)
        mask = mask.reshape(H, W).astype(np.int64)
        pos += nmask
    (tlen,) = struct.unpack_from("<Q", buf, pos)
    pos += 8
    if len(buf) != pos + tlen:
        raise TensorFileError(f"expected {pos + tlen} bytes, found {len(buf)}")
    try:
        meta = json.loads(buf[pos:].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise TensorFileError(f"bad JSON trailer: {exc}") from None
    pop = np.array(meta.pop("pixel_of_point"), dtype=np.int64).reshape(-1, 2)
    if pop.size and (pop.min() < 0 or pop[:, 0].max() >= H or pop[:, 1].max() >= W):
        raise TensorFileError("pixel_of_point entry outside the image")
    records = tuple(CollisionRecord.from_json(r) for r in meta.pop("collisions", []))
    return CloudImage(features=features, mask=mask, pixel_of_point=pop,
                      collisions=records, meta=meta)


def write_image(path, image: CloudImage) -> None:
    Path(path).write_bytes(encode_image(image))


def read_image(path) -> CloudImage:
    return decode_image(Path(path).read_bytes())
