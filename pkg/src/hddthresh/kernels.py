"""Backend selection for the density-evolution inner loops.

The compiled extension is used when it imports; setting the environment
variable ``HDDTHRESH_PURE_PYTHON=1`` forces the NumPy fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("HDDTHRESH_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py

scaled_update_array = _impl.scaled_update_array
fn_update_array = _impl.fn_update_array
scaled_coupled_run = _impl.scaled_coupled_run
finite_coupled_run = _impl.finite_coupled_run


def get_backend(name: str):
    """Return the kernel module for ``name`` ('cython' or 'python')."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")
