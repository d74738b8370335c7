"""Runtime configuration: tolerance profiles and kernel backend selection.

Two environment variables are read once at import time:

``MEDKIT_TOL``
    ``default`` or ``strict``; picks the certificate tolerance profile.
``MEDKIT_BACKEND``
    ``numba`` (default when numba imports) or ``numpy``; picks the
    implementation of the hot kernels in :mod:`medkit.kernels`.
"""

from __future__ import annotations

import os
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    construction: float = 1e-12
    algebraic: float = 1e-10
    certificate: float = 1e-9
    oracle: float = 1e-6
    hermitian: float = 1e-10
    outside_family: float = 1e-8
    nullspace: float = 1e-8


PROFILES = {
    "default": Tolerances(),
    "strict": Tolerances(certificate=1e-10, oracle=1e-7),
}


def tolerance_profile(name: str | None = None) -> Tolerances:
    name = name or os.environ.get("MEDKIT_TOL", "default")
    try:
        return PROFILES[name.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown MEDKIT_TOL profile {name!r}; expected one of {sorted(PROFILES)}") from None


TOL = tolerance_profile()


def requested_backend() -> str:
    value = os.environ.get("MEDKIT_BACKEND", "numba").strip().lower()
    if value not in ("numba", "numpy"):
        raise ValueError(f"MEDKIT_BACKEND must be 'numba' or 'numpy', got {value!r}")
    return value
