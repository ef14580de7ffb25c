"""Binary tensor container.

Layout, all integers little-endian u32::

    b"DNCW" | version | count | { name_len | name (utf-8) | rank | dims... | float32 payload }*
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import BinaryIO, Mapping

import numpy as np

MAGIC = b"DNCW"
VERSION = 1


class WeightFormatError(ValueError):
    pass


def write_tensors(fh: BinaryIO, tensors: Mapping[str, np.ndarray]) -> None:
    fh.write(MAGIC)
    fh.write(struct.pack("<II", VERSION, len(tensors)))
    for name, arr in tensors.items():
        raw = name.encode("utf-8")
        arr = np.asarray(arr)
        fh.write(struct.pack("<I", len(raw)))
        fh.write(raw)
        fh.write(struct.pack("<I", arr.ndim))
        fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
        fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def _read(fh: BinaryIO, n: int) -> bytes:
    buf = fh.read(n)
    if len(buf) != n:
        raise WeightFormatError("truncated weight file")
    return buf


def read_tensors(fh: BinaryIO) -> dict[str, np.ndarray]:
    if _read(fh, 4) != MAGIC:
        raise WeightFormatError("bad magic, not a DNCW weight file")
    version, count = struct.unpack("<II", _read(fh, 8))
    if version != VERSION:
        raise WeightFormatError(f"unsupported format version {version}")
    out: dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = struct.unpack("<I", _read(fh, 4))
        name = _read(fh, name_len).decode("utf-8")
        (rank,) = struct.unpack("<I", _read(fh, 4))
        dims = struct.unpack(f"<{rank}I", _read(fh, 4 * rank)) if rank else ()
        size = int(np.prod(dims)) if rank else 1
        data = np.frombuffer(_read(fh, 4 * size), dtype="<f4").astype(np.float32)
        out[name] = data.reshape(dims)
    return out


def save_tensors(path, tensors: Mapping[str, np.ndarray]) -> None:
    with open(Path(path), "wb") as fh:
        write_tensors(fh, tensors)


def load_tensors(path) -> dict[str, np.ndarray]:
    with open(Path(path), "rb") as fh:
        return read_tensors(fh)
