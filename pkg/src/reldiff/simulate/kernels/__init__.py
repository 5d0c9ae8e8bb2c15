"""Integrator kernels with a compiled core and a NumPy fallback.

The Cython extension is preferred when it was built; set
``RELDIFF_DISABLE_EXT=1`` to force the fallback.  Both backends run the same
arithmetic in float64 with identical accumulation order, so trajectories
agree to within a few ulps (bit-exactness is guaranteed within a backend,
not across backends, because elementwise transcendentals may differ by one
rounding).
"""

from __future__ import annotations

import os

if os.environ.get("RELDIFF_DISABLE_EXT"):
    from . import _fallback as _impl

    COMPILED = False
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        COMPILED = True
    except ImportError:
        from . import _fallback as _impl

        COMPILED = False

kuramoto_rk4 = _impl.kuramoto_rk4
spring_leapfrog = _impl.spring_leapfrog
var_recursion = _impl.var_recursion


def backend_name() -> str:
    return "compiled" if COMPILED else "numpy"


__all__ = ["kuramoto_rk4", "spring_leapfrog", "var_recursion", "backend_name", "COMPILED"]
