"""Kernel backend selection.

The compiled extension is used when it imports; set ``CUPFORM_PURE_PYTHON=1``
to force the reference implementation.
"""

import os

from cupform import _pykernels

if os.environ.get("CUPFORM_PURE_PYTHON"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from cupform import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

bareiss_rank = _impl.bareiss_rank
minor_residuals = _impl.minor_residuals

__all__ = ["BACKEND", "bareiss_rank", "minor_residuals"]
