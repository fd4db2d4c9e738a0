"""Backend selection for the log-Laplace kernels.

The Cython extension is used when it was built; otherwise the numpy
implementation in ``_kernel_py`` is loaded. Set ``ENTROBOUND_PURE_PYTHON=1``
to force the fallback.
"""
import os

import numpy as np

from . import _kernel_py

if os.environ.get("ENTROBOUND_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernel_py
else:
    try:
        from . import _kernel as _impl
    except ImportError:
        _impl = _kernel_py

BACKEND = "cython" if _impl is not _kernel_py else "python"


def _as_c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def cgf_value(z, logw, u, v, impl=None):
    return (impl or _impl).cgf_value(z, logw, float(u), float(v))


def cgf_eval(z, logw, u, v, impl=None):
    return (impl or _impl).cgf_eval(z, logw, float(u), float(v))


def cgf_values(z, logw, us, vs, impl=None):
    us, vs = np.broadcast_arrays(_as_c(us), _as_c(vs))
    shape = us.shape
    us, vs = _as_c(us.ravel()), _as_c(vs.ravel())
    out = np.empty(us.size)
    (impl or _impl).cgf_values_into(z, logw, us, vs, out)
    return out.reshape(shape)


def available_backends():
    """Modules usable as ``impl=``, keyed by name."""
    found = {"python": _kernel_py}
    try:
        from . import _kernel
    except ImportError:
        pass
    else:
        found["cython"] = _kernel
    return found
