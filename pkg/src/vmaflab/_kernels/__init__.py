"""Hot inner loops, with a numba path and a pure-numpy fallback.

The backend is chosen once at import time from ``VMAFLAB_BACKEND``
(``numba`` or ``numpy``). Without the variable, numba is used when it
imports cleanly. Both modules stay importable for cross-checking.
"""

import logging
import os

from . import numpy_impl

log = logging.getLogger(__name__)


def _select():
    want = os.environ.get("VMAFLAB_BACKEND", "").strip().lower()
    if want == "numpy":
        return numpy_impl
    if want not in ("", "numba"):
        raise ValueError(f"VMAFLAB_BACKEND must be 'numba' or 'numpy', got {want!r}")
    try:
        from . import numba_impl
    except ImportError:
        if want == "numba":
            raise
        log.info("numba unavailable, using numpy kernels")
        return numpy_impl
    return numba_impl


backend = _select()
BACKEND = backend.NAME

correlate_rows = backend.correlate_rows
correlate_cols = backend.correlate_cols
dwt_rows = backend.dwt_rows
clahe_maps = backend.clahe_maps
clahe_interp = backend.clahe_interp
nondominated_ranks = backend.nondominated_ranks
