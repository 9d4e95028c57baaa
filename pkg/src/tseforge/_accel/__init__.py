"""Backend dispatch for the hot kernels.

TSE_FORGE_BACKEND selects the implementation: "numba" (default when numba
imports cleanly) or "numpy". Both backends implement identical contracts;
benchmarks/bench_kernels.py compares their throughput.
"""

from __future__ import annotations

import os

from . import np_kernels

_requested = os.environ.get("TSE_FORGE_BACKEND", "auto").lower()

if _requested not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"TSE_FORGE_BACKEND={_requested!r} not recognised (use 'numba' or 'numpy')"
    )

if _requested == "numpy":
    BACKEND = "numpy"
else:
    try:
        from . import nb_kernels

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        BACKEND = "numpy"

if BACKEND == "numba":
    active_counts = nb_kernels.active_counts
    knn_mean = nb_kernels.knn_mean
else:
    active_counts = np_kernels.active_counts
    knn_mean = np_kernels.knn_mean

__all__ = ["BACKEND", "active_counts", "knn_mean"]
