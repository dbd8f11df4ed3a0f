"""Select the compiled kernels when built, otherwise the numpy fallback.

Set ``STUDENT_LEVY_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("STUDENT_LEVY_PURE_PYTHON") != "1":
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass

log_besselk = _impl.log_besselk
log_char_kernel = _impl.log_char_kernel
char_kernel_pow = _impl.char_kernel_pow
cos_quadrature = _impl.cos_quadrature

__all__ = [
    "BACKEND",
    "log_besselk",
    "log_char_kernel",
    "char_kernel_pow",
    "cos_quadrature",
]
