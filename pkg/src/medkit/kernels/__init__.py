"""Backend dispatch for the hot kernels.

``MEDKIT_BACKEND=numpy`` (or a failed numba import) selects the pure-numpy
path; otherwise the numba versions are used.  Both backends are importable
directly for parity tests and benchmarks::

    from medkit.kernels import numba_backend, numpy_backend
"""

from __future__ import annotations

import logging

from .._config import requested_backend
from . import _numpy as numpy_backend

log = logging.getLogger(__name__)

try:
    from . import _numba as numba_backend
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba_backend = None

BACKEND = requested_backend()
if BACKEND == "numba" and numba_backend is None:
    log.warning("numba unavailable; falling back to the numpy kernels")
    BACKEND = "numpy"

_active = numba_backend if BACKEND == "numba" else numpy_backend

OK = _active.OK
NOT_CONVERGED = _active.NOT_CONVERGED
SINGULAR = _active.SINGULAR


def active():
    return _active


def jacobi_eigh(a):
    return _active.jacobi_eigh(a)


def med_iterate(W, Pi0, step, max_iters, gap, cutoff):
    return _active.med_iterate(W, Pi0, float(step), int(max_iters), float(gap), float(cutoff))


def count_successes(prior_cdf, outcome_cdf, seed, start, stop):
    return _active.count_successes(prior_cdf, outcome_cdf, int(seed), int(start), int(stop))
