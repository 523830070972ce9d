"""Integrator backend selection.

The compiled kernels are used when the extension module built; otherwise
the pure-Python twins take over.  Set ``CAVDUET_PURE=1`` to force the pure
backend (used by the parity tests and the benchmark).
"""

import os

_force_pure = os.environ.get("CAVDUET_PURE", "").strip().lower() in {"1", "true", "yes"}

if _force_pure:
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

integrate_rotating = _impl.integrate_rotating
integrate_bare = _impl.integrate_bare


def backend_name() -> str:
    return BACKEND
