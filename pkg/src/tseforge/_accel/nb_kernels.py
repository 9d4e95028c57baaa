"""Numba twins of the hot kernels.

Same contracts as np_kernels: integer counts match exactly; knn sums run
in float64 over ascending selected indices so means match the numpy path
bit-for-bit whenever the selections agree.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def active_counts(envelope, thresholds, hangover):
    n = envelope.shape[0]
    nthr = thresholds.shape[0]
    counts = np.zeros(nthr, dtype=np.int64)
    hang = np.full(nthr, hangover, dtype=np.int64)
    for k in range(n):
        q = envelope[k]
        for j in range(nthr):
            if q >= thresholds[j]:
                counts[j] += 1
                hang[j] = 0
            elif hang[j] < hangover:
                counts[j] += 1
                hang[j] += 1
            else:
                # thresholds ascend, so everything above j is idle too
                break
    return counts


@njit(cache=True)
def knn_mean(query, pool, k):
    t_frames, dim = query.shape
    m_frames = pool.shape[0]
    pool_norm = np.empty(m_frames, dtype=np.float64)
    for m in range(m_frames):
        acc = 0.0
        for d in range(dim):
            acc += pool[m, d] * pool[m, d]
        pool_norm[m] = np.sqrt(acc)

    out = np.empty((t_frames, dim), dtype=np.float64)
    dist = np.empty(m_frames, dtype=np.float64)
    sel = np.empty(k, dtype=np.int64)
    for t in range(t_frames):
        qacc = 0.0
        for d in range(dim):
            qacc += query[t, d] * query[t, d]
        qnorm = np.sqrt(qacc)
        for m in range(m_frames):
            dot = 0.0
            for d in range(dim):
                dot += query[t, d] * pool[m, d]
            denom = qnorm * pool_norm[m]
            sim = dot / denom if denom > 0.0 else 0.0
            dist[m] = 1.0 - sim

        # k selection passes; strict < keeps the lowest index on ties
        for pick in range(k):
            best = -1
            best_d = np.inf
            for m in range(m_frames):
                taken = False
                for prev in range(pick):
                    if sel[prev] == m:
                        taken = True
                        break
                if taken:
                    continue
                if dist[m] < best_d:
                    best_d = dist[m]
                    best = m
            sel[pick] = best
        sel[:k].sort()

        for d in range(dim):
            acc = 0.0
            for i in range(k):
                acc += pool[sel[i], d]
            out[t, d] = acc / k
    return out
