"""FMX1 writing: magic "FMX1", u32 version=1, u32 rows, u32 cols (all
little-endian), then float32 row-major payload.

All writes are atomic (temp file in the destination directory, then rename)
so a crashed job never leaves a half-written matrix behind.
"""

import os
import struct
import tempfile
from pathlib import Path

import numpy as np

MAGIC = b"FMX1"
VERSION = 1
_HEADER = struct.Struct("<4sIII")


def atomic_write_bytes(path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_fmx(path, matrix) -> None:
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim == 1:
        m = m[np.newaxis, :]
    if m.ndim != 2 or m.size == 0:
        raise ValueError(f"FMX1 needs a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("FMX1 payload must be finite")
    if max(m.shape) > 0xFFFFFFFF:
        raise ValueError(f"matrix dimension {max(m.shape)} exceeds the u32 header")
    header = _HEADER.pack(MAGIC, VERSION, m.shape[0], m.shape[1])
    payload = np.ascontiguousarray(m, dtype="<f4").tobytes()
    atomic_write_bytes(path, header + payload)
