"""Frame-feature matrices: binary FMX1 format, cosine similarity, k-NN
frame selection, and synthetic-speaker latent interpolation.

FMX1 layout: magic "FMX1", version u32=1, rows u32, cols u32, then
rows*cols float32 values, everything little-endian, data row-major.
In memory matrices are float64; files store float32, so a matrix read
from disk round-trips bit-exactly.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _accel
from .errors import (
    BadMagic,
    DimensionOverflow,
    DimMismatch,
    PoolTooSmall,
    TruncatedFile,
    ZeroVector,
)
from .rng import SeededRng

MAGIC = b"FMX1"
VERSION = 1
_HEADER = struct.Struct("<4sIII")
_U32_MAX = 0xFFFFFFFF


@dataclass
class SaltConfig:
    """Knobs for synthetic-speaker interpolation."""

    k: int = 4
    p: float = 0.5
    n_refs: int = 4

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.n_refs < 1:
            raise ValueError("n_refs must be >= 1")


def _as_matrix(data) -> np.ndarray:
    m = np.asarray(data, dtype=np.float64)
    if m.ndim == 1:
        m = m[np.newaxis, :]
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimMismatch(f"expected a T x D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("feature matrix contains non-finite values")
    return m


def write_fmx(path, matrix) -> None:
    """Write a matrix as FMX1 (float32 little-endian, row-major)."""
    m = _as_matrix(matrix)
    rows, cols = m.shape
    if rows > _U32_MAX or cols > _U32_MAX:
        raise DimensionOverflow(f"{rows} x {cols} exceeds u32 header fields")
    data = np.ascontiguousarray(m, dtype="<f4")
    if not np.all(np.isfinite(data)):
        raise ValueError("values overflow float32 storage")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, rows, cols))
        fh.write(data.tobytes())


def read_fmx(path) -> np.ndarray:
    """Read an FMX1 file; returns float64 data holding the stored float32s."""
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < _HEADER.size:
        raise TruncatedFile(f"{path}: {len(blob)} bytes, header needs {_HEADER.size}")
    magic, version, rows, cols = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise BadMagic(f"{path}: magic {magic!r}")
    if version != VERSION:
        raise BadMagic(f"{path}: unsupported version {version}")
    expected = _HEADER.size + 4 * rows * cols
    if len(blob) < expected:
        raise TruncatedFile(f"{path}: {len(blob)} bytes, expected {expected}")
    flat = np.frombuffer(blob, dtype="<f4", count=rows * cols, offset=_HEADER.size)
    return flat.astype(np.float64).reshape(rows, cols)


def cosine_similarity(a, b) -> float:
    """a.b / (|a||b|) for two 1 x D vectors."""
    va = _as_matrix(a)
    vb = _as_matrix(b)
    if va.shape[0] != 1 or vb.shape[0] != 1:
        raise DimMismatch("cosine similarity expects single-row matrices")
    if va.shape[1] != vb.shape[1]:
        raise DimMismatch(f"dimension mismatch: {va.shape[1]} vs {vb.shape[1]}")
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine similarity of a zero vector is undefined")
    return float(va[0] @ vb[0]) / (na * nb)


def knn_select(query, pool, k: int) -> np.ndarray:
    """Per query frame, mean of the k nearest pool frames by cosine distance.

    Ties break toward the lowest pool index; zero-norm frames count as
    similarity 0 against everything.
    """
    q = _as_matrix(query)
    p = _as_matrix(pool)
    if q.shape[1] != p.shape[1]:
        raise DimMismatch(f"dimension mismatch: query D={q.shape[1]}, pool D={p.shape[1]}")
    if k < 1:
        raise ValueError("k must be >= 1")
    if p.shape[0] < k:
        raise PoolTooSmall(f"pool has {p.shape[0]} frames, k={k}")
    return _accel.knn_mean(np.ascontiguousarray(q), np.ascontiguousarray(p), k)


def draw_weights(n: int, rng: SeededRng, max_tries: int = 10000) -> np.ndarray:
    """Standard-normal draws normalized to sum to one.

    Resampled until all draws are positive and their sum exceeds 1e-3, so
    the result is always a convex combination free of sign-flip blowups.
    """
    for _ in range(max_tries):
        raw = rng.standard_normal(n)
        total = raw.sum()
        if np.all(raw > 0.0) and total > 1e-3:
            return raw / total
    raise RuntimeError("weight resampling failed to converge")


def salt_interpolate(
    query, pools: list, cfg: SaltConfig | None = None, rng: SeededRng | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Blend a query feature matrix toward k-NN selections from reference pools.

    For each reference pool j, D_j = knn_select(query, pool_j, k). Random
    positive weights w (summing to one) combine the selections, and the
    result is O = (1 - p) * sum_j w_j D_j + p * query. Returns (O, w); w is
    always drawn (and returned) even when p = 1, where O is the query
    itself, bit for bit.
    """
    if cfg is None:
        cfg = SaltConfig()
    if rng is None:
        raise ValueError("salt_interpolate requires an rng")
    q = _as_matrix(query)
    mats = [_as_matrix(p) for p in pools]
    if len(mats) != cfg.n_refs:
        raise DimMismatch(f"expected {cfg.n_refs} pools, got {len(mats)}")
    for j, m in enumerate(mats):
        if m.shape[1] != q.shape[1]:
            raise DimMismatch(f"pool {j}: D={m.shape[1]}, query D={q.shape[1]}")
        if m.shape[0] < cfg.k:
            raise PoolTooSmall(f"pool {j} has {m.shape[0]} frames, k={cfg.k}")

    weights = draw_weights(cfg.n_refs, rng)
    if cfg.p == 1.0:
        return q.copy(), weights

    blend = np.zeros_like(q)
    for j, m in enumerate(mats):
        blend += weights[j] * knn_select(q, m, cfg.k)
    out = (1.0 - cfg.p) * blend + cfg.p * q
    return out, weights
