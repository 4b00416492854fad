"""Backend selection for the hot kernels.

The Cython extension is used when it was built; otherwise the numpy
reference implementation takes over. Set ``QUADSHIFT_PURE_PYTHON=1`` to
force the fallback (tests and the benchmark do this to compare both).
"""
import os

from . import _pykernels

if os.environ.get("QUADSHIFT_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = _impl.BACKEND
band_matvec = _impl.band_matvec
chebyshev_apply = _impl.chebyshev_apply
cayley_solve = _impl.cayley_solve


def compiled_available():
    try:
        from . import _ckernels  # noqa: F401
    except ImportError:
        return False
    return True
