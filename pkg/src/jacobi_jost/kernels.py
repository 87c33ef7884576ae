"""Backend selection for the hot loops.

The compiled extension is used when it imports cleanly; setting the
environment variable ``JACOBI_JOST_PURE=1`` forces the pure-Python fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("JACOBI_JOST_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

forward_recurrence = _impl.forward_recurrence
backward_recurrence = _impl.backward_recurrence
volterra_suffix = _impl.volterra_suffix
sturm_count = _impl.sturm_count

__all__ = [
    "BACKEND",
    "forward_recurrence",
    "backward_recurrence",
    "volterra_suffix",
    "sturm_count",
]
