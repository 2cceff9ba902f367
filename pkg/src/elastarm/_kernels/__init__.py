"""Kernel backend selection.

The compiled extension is preferred when present; the pure numpy
fallback is picked up transparently otherwise.  Set ELASTARM_KERNELS to
``native`` or ``python`` to force a backend (``native`` raises if the
extension was not built).
"""

import os

_requested = os.environ.get("ELASTARM_KERNELS", "").strip().lower()

if _requested in ("", "native"):
    try:
        from . import _native as _impl
        BACKEND = "native"
    except ImportError:
        if _requested == "native":
            raise
        from . import _pure as _impl
        BACKEND = "python"
elif _requested in ("python", "pure"):
    from . import _pure as _impl
    BACKEND = "python"
else:
    raise ValueError(
        f"ELASTARM_KERNELS={_requested!r} not understood (use 'native' or 'python')"
    )

fk_pose = _impl.fk_pose
fk_jacobian = _impl.fk_jacobian
deflection_batch = _impl.deflection_batch
stiffness_diagonal_batch = _impl.stiffness_diagonal_batch


def backend_name():
    """Name of the kernel backend in use ('native' or 'python')."""
    return BACKEND
