"""Kernel backend selection: compiled extension if available, numpy otherwise.

Set ``CPSIGNAL_PURE=1`` to force the fallback (useful for benchmarking and
for debugging suspected extension issues).
"""

import os

from . import pure

if os.environ.get("CPSIGNAL_PURE"):
    _backend = pure
else:
    try:
        from . import _core as _backend
    except ImportError:
        _backend = pure

BACKEND = "compiled" if _backend is not pure else "pure"
HAVE_COMPILED = _backend is not pure

simplex_solve = _backend.simplex_solve
jacobi_eig = _backend.jacobi_eig

STATUS_OPTIMAL = pure.STATUS_OPTIMAL
STATUS_INFEASIBLE = pure.STATUS_INFEASIBLE
STATUS_UNBOUNDED = pure.STATUS_UNBOUNDED
STATUS_NUMERICAL = pure.STATUS_NUMERICAL
