"""Numba-jitted kernel implementations.

Hot inner loops of relation-mask enumeration.  Contracts match the numpy
backend in ``_kernels_numpy``.
"""

from __future__ import annotations

import numpy as np
from numba import njit

NAME = "numba"

_ONE = np.uint64(1)
_ZERO = np.uint64(0)


@njit(cache=True)
def _count_passing(n_free, free_pos, base, guard_p, guard_w):
    total = 0
    for s in range(1 << n_free):
        m = base
        for b in range(n_free):
            if (s >> b) & 1:
                m |= _ONE << np.uint64(free_pos[b])
        ok = True
        for i in range(guard_p.shape[0]):
            if (m & guard_p[i]) == guard_p[i] and (m & guard_w[i]) == _ZERO:
                ok = False
                break
        if ok:
            total += 1
    return total


@njit(cache=True)
def _passing_masks(n_free, free_pos, base, guard_p, guard_w):
    space = 1 << n_free
    out = np.empty(space, dtype=np.uint64)
    count = 0
    for s in range(space):
        m = base
        for b in range(n_free):
            if (s >> b) & 1:
                m |= _ONE << np.uint64(free_pos[b])
        ok = True
        for i in range(guard_p.shape[0]):
            if (m & guard_p[i]) == guard_p[i] and (m & guard_w[i]) == _ZERO:
                ok = False
                break
        if ok:
            out[count] = m
            count += 1
    return out[:count].copy()


@njit(cache=True)
def _close_masks(masks, horn_prem, horn_conc):
    out = masks.copy()
    for i in range(out.shape[0]):
        m = out[i]
        changed = True
        while changed:
            changed = False
            for r in range(horn_prem.shape[0]):
                if (m >> np.uint64(horn_prem[r])) & _ONE:
                    if not (m >> np.uint64(horn_conc[r])) & _ONE:
                        m |= _ONE << np.uint64(horn_conc[r])
                        changed = True
        out[i] = m
    return out


@njit(cache=True)
def _check_masks(masks, guard_p, guard_w):
    out = np.empty(masks.shape[0], dtype=np.bool_)
    for i in range(masks.shape[0]):
        m = masks[i]
        ok = True
        for g in range(guard_p.shape[0]):
            if (m & guard_p[g]) == guard_p[g] and (m & guard_w[g]) == _ZERO:
                ok = False
                break
        out[i] = ok
    return out


def count_passing(n_free, free_pos, base, guard_p, guard_w) -> int:
    return int(_count_passing(n_free, free_pos, np.uint64(base), guard_p, guard_w))


def passing_masks(n_free, free_pos, base, guard_p, guard_w):
    return _passing_masks(n_free, free_pos, np.uint64(base), guard_p, guard_w)


def close_masks(masks, horn_prem, horn_conc):
    return _close_masks(masks.astype(np.uint64), horn_prem, horn_conc)


def check_masks(masks, guard_p, guard_w):
    return _check_masks(masks.astype(np.uint64), guard_p, guard_w)
