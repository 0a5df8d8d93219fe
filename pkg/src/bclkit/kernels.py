"""Backend selection for the enumeration kernels.

``BCLKIT_BACKEND=numba`` or ``BCLKIT_BACKEND=numpy`` pins the backend;
unset (or ``auto``) prefers numba and falls back to the pure-numpy path
when numba is unavailable.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_numpy

__all__ = ["backend", "get_backend", "backend_name",
           "count_passing", "passing_masks", "close_masks", "check_masks",
           "as_guard_arrays", "as_horn_arrays"]

_ENV = "BCLKIT_BACKEND"


def get_backend(name: str):
    """Kernel module for an explicit backend name."""
    name = name.lower()
    if name == "numpy":
        return _kernels_numpy
    if name == "numba":
        from . import _kernels_numba
        return _kernels_numba
    raise ValueError(f"unknown kernel backend {name!r}")


def _select():
    choice = os.environ.get(_ENV, "auto").lower()
    if choice in ("auto", ""):
        try:
            return get_backend("numba")
        except ImportError:
            return _kernels_numpy
    return get_backend(choice)


_backend = None


def backend():
    global _backend
    if _backend is None:
        _backend = _select()
    return _backend


def backend_name() -> str:
    return backend().NAME


def as_guard_arrays(guards):
    """(P, W) uint64 arrays from compiled (P, W, label) guards."""
    gp = np.array([g[0] for g in guards], dtype=np.uint64)
    gw = np.array([g[1] for g in guards], dtype=np.uint64)
    return gp, gw


def as_horn_arrays(horn):
    hp = np.array([r[0] for r in horn], dtype=np.int64)
    hc = np.array([r[1] for r in horn], dtype=np.int64)
    return hp, hc


def count_passing(n_free, free_pos, base, guard_p, guard_w) -> int:
    return backend().count_passing(n_free, free_pos, base, guard_p, guard_w)


def passing_masks(n_free, free_pos, base, guard_p, guard_w):
    return backend().passing_masks(n_free, free_pos, base, guard_p, guard_w)


def close_masks(masks, horn_prem, horn_conc):
    return backend().close_masks(masks, horn_prem, horn_conc)


def check_masks(masks, guard_p, guard_w):
    return backend().check_masks(masks, guard_p, guard_w)
