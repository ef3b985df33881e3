"""Kernel backend selection.

The compiled extension is used when it imported cleanly; set
``ROUNDVOL_DISABLE_EXTENSION=1`` to force the pure-numpy fallback.
Both backends expose the same functions (``cell_sums``, ``signed_cell_sums``,
``euler_path``, ``zsum_squares``, ``cell_index``) with identical semantics.
"""

import os

from . import pyref

if os.environ.get("ROUNDVOL_DISABLE_EXTENSION", "") not in ("", "0"):
    _impl = pyref
else:
    try:
        from . import fastcore as _impl
    except ImportError:
        _impl = pyref

BACKEND = _impl.BACKEND
cell_index = _impl.cell_index
cell_sums = _impl.cell_sums
signed_cell_sums = _impl.signed_cell_sums
euler_path = _impl.euler_path
zsum_squares = _impl.zsum_squares
