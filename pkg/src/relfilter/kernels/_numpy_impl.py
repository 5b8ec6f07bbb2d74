"""Pure NumPy implementations of the hot kernels.

Selected at import time when the compiled extension is unavailable or
RELFILTER_PURE_PYTHON is set.  Same contracts as ``_native``; results may
differ from the compiled path in the last few bits because BLAS reductions
sum in a different order.
"""

from __future__ import annotations

import numpy as np

# bound on block_rows * n_queries to keep temporary distance matrices small
_BLOCK_CELLS = 2_000_000


def kde_scores(x: np.ndarray, q: np.ndarray, gamma: float) -> np.ndarray:
    """Mean Gaussian kernel exp(-gamma * ||x_i - q_j||^2) over queries.

    x: (n, d) float64, q: (m, d) float64; returns (n,) float64.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    q = np.ascontiguousarray(q, dtype=np.float64)
    n = x.shape[0]
    m = q.shape[0]
    xx = np.einsum("ij,ij->i", x, x)
    qq = np.einsum("ij,ij->i", q, q)
    out = np.empty(n, dtype=np.float64)
    block = max(1, _BLOCK_CELLS // max(m, 1))
    for start in range(0, n, block):
        stop = min(start + block, n)
        d2 = xx[start:stop, None] + qq[None, :] - 2.0 * (x[start:stop] @ q.T)
        np.maximum(d2, 0.0, out=d2)  # cancellation can leave tiny negatives
        out[start:stop] = np.exp(-gamma * d2).mean(axis=1)
    return out


def svm_epoch(x: np.ndarray, y: np.ndarray, alpha: np.ndarray, w: np.ndarray,
              c: float, qii: np.ndarray, order: np.ndarray) -> float:
    """One dual coordinate descent epoch over ``order``; updates in place.

    Returns the largest projected-gradient magnitude seen this epoch.
    """
    max_pg = 0.0
    for i in order:
        g = y[i] * float(w @ x[i]) - 1.0
        a = alpha[i]
        if a <= 0.0:
            pg = min(g, 0.0)
        elif a >= c:
            pg = max(g, 0.0)
        else:
            pg = g
        if abs(pg) > max_pg:
            max_pg = abs(pg)
        if pg != 0.0:
            a_new = min(max(a - g / qii[i], 0.0), c)
            if a_new != a:
                w += (a_new - a) * y[i] * x[i]
                alpha[i] = a_new
    return max_pg


def cosine_pairs(x: np.ndarray, threshold: float):
    """All row pairs (i < j) with cosine similarity >= threshold.

    Returns (i_idx, j_idx, sims) in row-major pair order.  Zero-norm rows
    have similarity 0 with everything.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = x.shape[0]
    norms = np.linalg.norm(x, axis=1)
    safe = np.where(norms > 0.0, norms, 1.0)
    unit = x / safe[:, None]
    ia, ja, sims = [], [], []
    block = max(1, _BLOCK_CELLS // max(n, 1))
    for start in range(0, n, block):
        stop = min(start + block, n)
        gram = unit[start:stop] @ unit.T
        for local_i in range(stop - start):
            i = start + local_i
            row = gram[local_i, i + 1:]
            # candidates a hair below 1 may still be exact duplicates whose
            # dot product rounded down an ulp; widen, snap, then re-test
            hits = np.nonzero(row >= min(threshold, 1.0 - 1e-12))[0]
            for off in hits:
                j = i + 1 + int(off)
                sim = min(float(row[off]), 1.0)
                if sim > 1.0 - 1e-12 and np.array_equal(x[i], x[j]):
                    sim = 1.0
                if sim >= threshold:
                    ia.append(i)
                    ja.append(j)
                    sims.append(sim)
    return (np.array(ia, dtype=np.int64), np.array(ja, dtype=np.int64),
            np.array(sims, dtype=np.float64))
