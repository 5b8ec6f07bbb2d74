"""Hot numeric kernels with a compiled core and a NumPy fallback.

The compiled Cython extension is preferred when it imports cleanly;
setting RELFILTER_PURE_PYTHON=1 forces the NumPy fallback.  Both expose
the same three functions:

    kde_scores(x, q, gamma)          -> (n,) scores
    svm_epoch(x, y, alpha, w, c,
              qii, order)            -> max projected-gradient magnitude
    cosine_pairs(x, threshold)       -> (i_idx, j_idx, sims)
"""

from __future__ import annotations

import os

if os.environ.get("RELFILTER_PURE_PYTHON"):
    from . import _numpy_impl as _impl
    HAVE_NATIVE = False
else:
    try:
        from . import _native as _impl  # type: ignore[attr-defined]
        HAVE_NATIVE = True
    except ImportError:
        from . import _numpy_impl as _impl
        HAVE_NATIVE = False

BACKEND = "native" if HAVE_NATIVE else "numpy"

kde_scores = _impl.kde_scores
svm_epoch = _impl.svm_epoch
cosine_pairs = _impl.cosine_pairs

__all__ = ["kde_scores", "svm_epoch", "cosine_pairs", "HAVE_NATIVE", "BACKEND"]
