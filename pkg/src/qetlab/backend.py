"""Kernel backend selection.

The hot kernels exist twice: a compiled Cython core (``_kernels_c``) and a
pure numpy fallback (``_kernels_np``).  The compiled core is preferred when
importable; set ``QET_BACKEND=pure`` or ``QET_BACKEND=compiled`` to force a
choice.  ``benchmarks/bench_backends.py`` compares the two.
"""

import os

from . import _kernels_np

_pure = _kernels_np
_compiled = None
try:
    from . import _kernels_c as _compiled  # type: ignore[no-redef]
except ImportError:
    _compiled = None


def available_backends():
    """Names of the importable backends."""
    names = ["pure"]
    if _compiled is not None:
        names.insert(0, "compiled")
    return names


def get_backend(name):
    """Return the kernel module for ``name`` ("pure" or "compiled")."""
    if name == "pure":
        return _pure
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernel core is not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def _select():
    forced = os.environ.get("QET_BACKEND", "").strip().lower()
    if forced:
        return get_backend(forced)
    return _compiled if _compiled is not None else _pure


_active = _select()

BACKEND = _active.BACKEND_NAME
gaussian_eval = _active.gaussian_eval
bump_eval = _active.bump_eval
pwcubic_eval = _active.pwcubic_eval
inv_cube_kernel = _active.inv_cube_kernel
phase_sum = _active.phase_sum
