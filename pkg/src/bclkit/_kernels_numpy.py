"""Pure-numpy kernel implementations.

Fallback backend for relation-mask enumeration; same contracts as the
numba backend.  Relations are uint64 bitmasks over carrier pairs, guards
are (P, W) mask pairs flagging a violation when ``mask & P == P`` and
``mask & W == 0``.
"""

from __future__ import annotations

import numpy as np

NAME = "numpy"

_CHUNK = 1 << 16


def _scatter(svals: np.ndarray, free_pos: np.ndarray, base: np.uint64) -> np.ndarray:
    masks = np.full(svals.shape, base, dtype=np.uint64)
    for b in range(free_pos.shape[0]):
        bit = (svals >> np.uint64(b)) & np.uint64(1)
        masks |= bit << np.uint64(free_pos[b])
    return masks


def _passing(masks: np.ndarray, guard_p: np.ndarray, guard_w: np.ndarray) -> np.ndarray:
    ok = np.ones(masks.shape, dtype=bool)
    for i in range(guard_p.shape[0]):
        viol = ((masks & guard_p[i]) == guard_p[i]) & ((masks & guard_w[i]) == 0)
        ok &= ~viol
    return ok


def count_passing(n_free: int, free_pos: np.ndarray, base: np.uint64,
                  guard_p: np.ndarray, guard_w: np.ndarray) -> int:
    """Count masks (base plus any subset of the free bits) passing all guards."""
    total = 0
    space = 1 << n_free
    for start in range(0, space, _CHUNK):
        svals = np.arange(start, min(start + _CHUNK, space), dtype=np.uint64)
        masks = _scatter(svals, free_pos, base)
        total += int(_passing(masks, guard_p, guard_w).sum())
    return total


def passing_masks(n_free: int, free_pos: np.ndarray, base: np.uint64,
                  guard_p: np.ndarray, guard_w: np.ndarray) -> np.ndarray:
    """All passing masks, in ascending order of the free-bit subset index."""
    out = []
    space = 1 << n_free
    for start in range(0, space, _CHUNK):
        svals = np.arange(start, min(start + _CHUNK, space), dtype=np.uint64)
        masks = _scatter(svals, free_pos, base)
        out.append(masks[_passing(masks, guard_p, guard_w)])
    return np.concatenate(out) if out else np.zeros(0, dtype=np.uint64)


def close_masks(masks: np.ndarray, horn_prem: np.ndarray,
                horn_conc: np.ndarray) -> np.ndarray:
    """Horn closure of each mask: while some premise bit is set and its
    conclusion bit is not, set the conclusion bit."""
    out = masks.astype(np.uint64, copy=True)
    if horn_prem.shape[0] == 0 or out.shape[0] == 0:
        return out
    changed = True
    while changed:
        before = out.copy()
        for r in range(horn_prem.shape[0]):
            bit = (out >> np.uint64(horn_prem[r])) & np.uint64(1)
            out |= bit << np.uint64(horn_conc[r])
        changed = bool((out != before).any())
    return out


def check_masks(masks: np.ndarray, guard_p: np.ndarray,
                guard_w: np.ndarray) -> np.ndarray:
    """Boolean pass/fail per mask against the guards."""
    return _passing(masks.astype(np.uint64, copy=False), guard_p, guard_w)
