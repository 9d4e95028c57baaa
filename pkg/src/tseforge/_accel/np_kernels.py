"""Pure-numpy implementations of the hot kernels.

These are the reference semantics; the numba twins in nb_kernels.py must
produce identical results (integer counts exactly, float selections and
sums bit-for-bit given the documented accumulation order).
"""

from __future__ import annotations

import numpy as np


def active_counts(envelope: np.ndarray, thresholds: np.ndarray, hangover: int) -> np.ndarray:
    """Per-threshold active-sample counts with hangover.

    A sample counts toward threshold c when the envelope is at or above c,
    or when fewer than `hangover` samples have passed since it last was.
    The hangover window starts expired.
    """
    n = envelope.shape[0]
    counts = np.zeros(thresholds.shape[0], dtype=np.int64)
    positions = np.arange(n, dtype=np.int64)
    for j, c in enumerate(thresholds):
        above = envelope >= c
        # index of the most recent sample at/above the threshold, -inf-like when none
        last_above = np.where(above, positions, np.int64(-hangover - 1))
        last_above = np.maximum.accumulate(last_above)
        counts[j] = int(np.count_nonzero(positions - last_above <= hangover))
    return counts


def knn_mean(query: np.ndarray, pool: np.ndarray, k: int) -> np.ndarray:
    """Mean of the k pool frames nearest (cosine distance) to each query frame.

    Ties break toward the lowest pool index. Zero-norm frames behave as if
    orthogonal to everything (similarity 0). Selected frames are summed in
    ascending pool-index order in float64.
    """
    q = np.ascontiguousarray(query, dtype=np.float64)
    p = np.ascontiguousarray(pool, dtype=np.float64)
    qn = np.sqrt((q * q).sum(axis=1))
    pn = np.sqrt((p * p).sum(axis=1))
    denom = np.outer(qn, pn)
    sims = q @ p.T
    np.divide(sims, denom, out=sims, where=denom > 0.0)
    sims[:, pn == 0.0] = 0.0
    if np.any(qn == 0.0):
        sims[qn == 0.0, :] = 0.0
    dist = 1.0 - sims

    # stable sort keeps the lowest pool index first among exact ties
    order = np.argsort(dist, axis=1, kind="stable")[:, :k]
    order.sort(axis=1)
    out = np.empty((q.shape[0], q.shape[1]), dtype=np.float64)
    for t in range(q.shape[0]):
        out[t] = np.add.reduce(p[order[t]], axis=0)
    out /= k
    return out
