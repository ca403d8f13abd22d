"""Backend selection for the per-trial kernels.

The compiled extension is used when it was built; otherwise the numpy
fallback. Setting ``SPARSETRAIN_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _kernels_py as python

try:
    from . import _kernels as compiled
except ImportError:  # extension not built
    compiled = None

if compiled is not None and os.environ.get("SPARSETRAIN_PURE_PYTHON", "") != "1":
    _backend = compiled
    BACKEND = "compiled"
else:
    _backend = python
    BACKEND = "python"

threshold_estimate = _backend.threshold_estimate
bg_posterior = _backend.bg_posterior
omp = _backend.omp


def backends():
    """Available kernel modules keyed by name."""
    found = {"python": python}
    if compiled is not None:
        found["compiled"] = compiled
    return found
