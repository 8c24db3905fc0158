"""
Per-stage LLR memory banks with copy-on-write sharing between list paths.

Stage ``m`` (1..n) owns at most ``L_m`` banks of ``2**(n-m)`` LLRs. Paths
hold bank indices, not bank contents; cloning a path only bumps reference
counts, and a shared bank is copied the first time one of its holders writes
to it. The pool is preallocated at exactly ``sum(L_m * 2**(n-m))`` slots, so
running out of banks is a bug in the survivor schedule, never a silent
reallocation.
"""
from __future__ import annotations

from collections import namedtuple

import numba
import numpy as np

__all__ = ["ListState", "bank_for_write", "new_list_arrays"]

ListArrays = namedtuple(
    "ListArrays",
    [
        "llr",  # float64[sum cap_m * size_m]
        "offset",  # int64[n+1]
        "size",  # int64[n+1]
        "cap",  # int64[n+1]
        "ref",  # int64[n+1, Lmax]
        "free_banks",  # int64[n+1, Lmax]
        "free_top",  # int64[n+1]
        "live",  # int64[n+1]
        "peak",  # int64[n+1]
        "path_bank",  # int64[S, n+1]
        "free_slots",  # int64[S]
        "slot_top",  # int64[1]
        "metric",  # float64[S]
        "dec",  # uint8[S, N]
        "ps",  # uint8[S, N]
        "counters",  # int64[2]: llr updates, bank copies
    ],
)


def new_list_arrays(n: int, limits, slots: int | None = None) -> ListArrays:
    limits = [int(v) for v in limits]
    if len(limits) != n:
        raise ValueError(f"need {n} per-stage limits, got {len(limits)}")
    N = 1 << n
    lmax = max(limits)
    S = slots if slots is not None else limits[-1]
    cap = np.zeros(n + 1, dtype=np.int64)
    cap[1:] = limits
    size = np.array([1 << (n - m) for m in range(n + 1)], dtype=np.int64)
    offset = np.zeros(n + 1, dtype=np.int64)
    total = 0
    for m in range(1, n + 1):
        offset[m] = total
        total += cap[m] * size[m]
    free_banks = np.zeros((n + 1, lmax), dtype=np.int64)
    free_top = np.zeros(n + 1, dtype=np.int64)
    for m in range(1, n + 1):
        # pop order 0, 1, 2, ...
        free_banks[m, : cap[m]] = np.arange(cap[m])[::-1]
        free_top[m] = cap[m]
    return ListArrays(
        llr=np.zeros(total),
        offset=offset,
        size=size,
        cap=cap,
        ref=np.zeros((n + 1, lmax), dtype=np.int64),
        free_banks=free_banks,
        free_top=free_top,
        live=np.zeros(n + 1, dtype=np.int64),
        peak=np.zeros(n + 1, dtype=np.int64),
        path_bank=np.full((S, n + 1), -1, dtype=np.int64),
        free_slots=np.arange(S, dtype=np.int64)[::-1].copy(),
        slot_top=np.array([S], dtype=np.int64),
        metric=np.zeros(S),
        dec=np.zeros((S, N), dtype=np.uint8),
        ps=np.zeros((S, N), dtype=np.uint8),
        counters=np.zeros(2, dtype=np.int64),
    )


@numba.njit(cache=True, inline="always")
def _alloc_bank(st, m):
    if st.free_top[m] == 0:
        raise RuntimeError("stage bank budget exceeded")
    st.free_top[m] -= 1
    b = st.free_banks[m, st.free_top[m]]
    st.ref[m, b] = 1
    st.live[m] += 1
    if st.live[m] > st.peak[m]:
        st.peak[m] = st.live[m]
    return b


@numba.njit(cache=True, inline="always")
def _release_bank(st, m, b):
    st.ref[m, b] -= 1
    if st.ref[m, b] == 0:
        st.free_banks[m, st.free_top[m]] = b
        st.free_top[m] += 1
        st.live[m] -= 1


@numba.njit(cache=True, inline="always")
def _bank_for_write(st, slot, m):
    b = st.path_bank[slot, m]
    if b >= 0 and st.ref[m, b] == 1:
        return b
    nb = _alloc_bank(st, m)
    if b >= 0:
        sz = st.size[m]
        src = st.offset[m] + b * sz
        dst = st.offset[m] + nb * sz
        st.llr[dst : dst + sz] = st.llr[src : src + sz]
        st.counters[1] += 1
        _release_bank(st, m, b)
    st.path_bank[slot, m] = nb
    return nb


@numba.njit(cache=True)
def _new_path(st):
    if st.slot_top[0] == 0:
        raise RuntimeError("path slots exhausted")
    st.slot_top[0] -= 1
    slot = st.free_slots[st.slot_top[0]]
    st.path_bank[slot, :] = -1
    st.metric[slot] = 0.0
    return slot


@numba.njit(cache=True)
def _kill_path(st, slot):
    n = st.path_bank.shape[1] - 1
    for m in range(1, n + 1):
        b = st.path_bank[slot, m]
        if b >= 0:
            _release_bank(st, m, b)
            st.path_bank[slot, m] = -1
    st.free_slots[st.slot_top[0]] = slot
    st.slot_top[0] += 1


@numba.njit(cache=True)
def _clone_path(st, slot, upto):
    """New path sharing every bank of ``slot``; copies the first ``upto`` decisions."""
    new = _new_path(st)
    n = st.path_bank.shape[1] - 1
    for m in range(1, n + 1):
        b = st.path_bank[slot, m]
        st.path_bank[new, m] = b
        if b >= 0:
            st.ref[m, b] += 1
    st.metric[new] = st.metric[slot]
    st.dec[new, :upto] = st.dec[slot, :upto]
    st.ps[new, :upto] = st.ps[slot, :upto]
    return new


class ListState:
    """Python handle on the list-decoder memory.

    Mostly useful for inspection and tests; the decoders build one per call.
    """

    def __init__(self, n: int, limits, slots: int | None = None):
        self.n = n
        self.limits = tuple(int(v) for v in limits)
        self.arrays = new_list_arrays(n, self.limits, slots)

    def new_path(self) -> int:
        return int(_new_path(self.arrays))

    def clone(self, slot: int, upto: int = 0) -> int:
        return int(_clone_path(self.arrays, slot, upto))

    def kill(self, slot: int) -> None:
        _kill_path(self.arrays, slot)

    def bank(self, slot: int, m: int) -> np.ndarray:
        """View of the stage-``m`` bank held by ``slot``."""
        a = self.arrays
        b = a.path_bank[slot, m]
        if b < 0:
            raise LookupError(f"path {slot} holds no stage-{m} bank")
        start = a.offset[m] + b * a.size[m]
        return a.llr[start : start + a.size[m]]

    def ref_count(self, slot: int, m: int) -> int:
        b = self.arrays.path_bank[slot, m]
        return int(self.arrays.ref[m, b]) if b >= 0 else 0

    @property
    def peak_banks(self) -> np.ndarray:
        return self.arrays.peak[1:].copy()

    @property
    def live_banks(self) -> np.ndarray:
        return self.arrays.live[1:].copy()

    @property
    def llr_updates(self) -> int:
        return int(self.arrays.counters[0])

    @property
    def bank_copies(self) -> int:
        return int(self.arrays.counters[1])


def bank_for_write(state: ListState, slot: int, m: int) -> int:
    """Bank index that ``slot`` may overwrite at stage ``m``.

    An exclusively held bank is returned as is. A shared bank is copied into a
    fresh one from the stage-``m`` budget and the path is rebound to the copy.
    """
    if not 1 <= m <= state.n:
        raise ValueError(f"stage must be in [1, {state.n}], got {m}")
    return int(_bank_for_write(state.arrays, slot, m))
