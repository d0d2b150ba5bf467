"""Kernel dispatch: compiled extension when importable, else pure Python.

Set ``DSETS_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels as python

if os.environ.get("DSETS_PURE_PYTHON"):
    compiled = None
else:
    try:
        from . import _ckernels as compiled
    except ImportError:
        compiled = None

_impl = compiled if compiled is not None else python
BACKEND = "cython" if compiled is not None else "python"

ring_square = _impl.ring_square
lift_preimages = _impl.lift_preimages
