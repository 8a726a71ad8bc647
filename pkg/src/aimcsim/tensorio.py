"""Tensor import/export and training checkpoints.

Binary tensor block (all integers little-endian):

    magic   4 bytes  b"AIMT"
    dtype   u8       0 = float64, 1 = float32, 2 = int64
    ndim    u8
    shape   ndim x u64
    data    C-order raw bytes, little-endian

A checkpoint file is a JSON manifest followed by named tensor blocks:

    magic     8 bytes  b"AIMCKPT1"
    man_len   u32
    manifest  man_len bytes of UTF-8 JSON
    count     u32
    entries   count x (name_len u16, name UTF-8, tensor block)

The CSV tensor form puts the shape on the first row ("shape", dims...)
and one matrix row per line after it.
"""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

_TENSOR_MAGIC = b"AIMT"
_CKPT_MAGIC = b"AIMCKPT1"
_DTYPES = {0: "<f8", 1: "<f4", 2: "<i8"}
_DTYPE_CODES = {np.dtype("float64"): 0, np.dtype("float32"): 1,
                np.dtype("int64"): 2}


def _tensor_bytes(arr: np.ndarray) -> bytes:
    arr = np.ascontiguousarray(arr)
    if arr.dtype not in _DTYPE_CODES:
        arr = arr.astype(np.float64)
    code = _DTYPE_CODES[arr.dtype]
    head = _TENSOR_MAGIC + struct.pack("<BB", code, arr.ndim)
    head += struct.pack(f"<{arr.ndim}Q", *arr.shape)
    return head + arr.astype(_DTYPES[code]).tobytes(order="C")


def _read_tensor(buf: bytes, offset: int) -> tuple[np.ndarray, int]:
    if buf[offset:offset + 4] != _TENSOR_MAGIC:
        raise ValueError("not a tensor block (bad magic)")
    code, ndim = struct.unpack_from("<BB", buf, offset + 4)
    if code not in _DTYPES:
        raise ValueError(f"unknown dtype code {code}")
    shape = struct.unpack_from(f"<{ndim}Q", buf, offset + 6)
    dtype = np.dtype(_DTYPES[code])
    start = offset + 6 + 8 * ndim
    n_bytes = int(np.prod(shape)) * dtype.itemsize if ndim else dtype.itemsize
    data = np.frombuffer(buf[start:start + n_bytes], dtype=dtype)
    return data.reshape(shape).copy(), start + n_bytes


def save_tensor(path, arr: np.ndarray) -> None:
    Path(path).write_bytes(_tensor_bytes(np.asarray(arr)))


def load_tensor(path) -> np.ndarray:
    arr, _ = _read_tensor(Path(path).read_bytes(), 0)
    return arr


def save_tensor_csv(path, arr: np.ndarray) -> None:
    arr = np.asarray(arr, dtype=float)
    mat = np.atleast_2d(arr)
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["shape"] + [str(d) for d in arr.shape])
        for row in mat:
            writer.writerow([repr(float(v)) for v in row])


def load_tensor_csv(path) -> np.ndarray:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        head = next(reader)
        if not head or head[0] != "shape":
            raise ValueError(f"{path}: missing shape header row")
        shape = tuple(int(d) for d in head[1:])
        data = [[float(v) for v in row] for row in reader if row]
    return np.array(data).reshape(shape)


def save_checkpoint(path, tensors: dict[str, np.ndarray], manifest: dict) -> None:
    man = json.dumps(manifest, sort_keys=True).encode()
    parts = [_CKPT_MAGIC, struct.pack("<I", len(man)), man,
             struct.pack("<I", len(tensors))]
    for name, arr in tensors.items():
        enc = name.encode()
        parts.append(struct.pack("<H", len(enc)))
        parts.append(enc)
        parts.append(_tensor_bytes(np.asarray(arr)))
    Path(path).write_bytes(b"".join(parts))


def load_checkpoint(path) -> tuple[dict[str, np.ndarray], dict]:
    buf = Path(path).read_bytes()
    if buf[:8] != _CKPT_MAGIC:
        raise ValueError(f"{path}: not a checkpoint file")
    (man_len,) = struct.unpack_from("<I", buf, 8)
    manifest = json.loads(buf[12:12 + man_len].decode())
    offset = 12 + man_len
    (count,) = struct.unpack_from("<I", buf, offset)
    offset += 4
    tensors = {}
    for _ in range(count):
        (name_len,) = struct.unpack_from("<H", buf, offset)
        offset += 2
        name = buf[offset:offset + name_len].decode()
        offset += name_len
        tensors[name], offset = _read_tensor(buf, offset)
    return tensors, manifest
