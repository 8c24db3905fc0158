"""
LLR-domain SC, SCL and reduced-complexity SCL (R-SCL) decoding.

All list decoders share one kernel. It is driven by a per-level survivor
budget: SCL keeps ``L`` paths everywhere, while R-SCL keeps ``L_m`` paths
after level ``i`` with ``m = n - f(i + 1)``, where ``f`` is the index of the
lowest set bit. That bounds the number of live stage-``m`` banks by ``L_m``.
Optional CRC checks can be attached to levels; candidates failing them are
dropped before the budget is applied.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numba
import numpy as np

from .banks import _bank_for_write, _clone_path, _kill_path, _new_path, new_list_arrays
from .crc import CrcSpec, crc_remainder, get_crc
from .llr import boxplus, boxplus_minsum, g_update, metric_update
from .polar import PolarCode, lowest_set_bit_index
from .presets import DESK_LVECTORS, LVECTOR_PRESETS

__all__ = [
    "CrcCheck",
    "DecodeResult",
    "DecoderStats",
    "LVector",
    "genie_sc_llrs",
    "list_decode",
    "rscl_decode",
    "sc_decode",
    "scl_decode",
    "survivor_schedule",
]


@dataclass(frozen=True)
class LVector:
    """Per-stage bank limits ``[L_1, ..., L_n]``; ``L_n`` is the list size."""

    limits: tuple

    def __post_init__(self):
        lim = tuple(int(v) for v in self.limits)
        if not lim:
            raise ValueError("an L-vector needs at least one stage")
        if any(v < 1 for v in lim):
            raise ValueError(f"L-vector entries must be positive, got {lim}")
        if any(b < a for a, b in zip(lim, lim[1:])):
            raise ValueError(f"L-vector must be non-decreasing, got {lim}")
        object.__setattr__(self, "limits", lim)

    @classmethod
    def uniform(cls, n: int, L: int) -> "LVector":
        return cls((L,) * n)

    @classmethod
    def parse(cls, text: str) -> "LVector":
        """Accept a preset name (``"L3"``, ``"L3_n10"``), ``"32x11"`` or ``"22,24,26,28,30,32x6"``."""
        text = text.strip()
        if text in LVECTOR_PRESETS:
            return cls(LVECTOR_PRESETS[text])
        if text in DESK_LVECTORS:
            return cls(DESK_LVECTORS[text])
        out = []
        for tok in text.replace(" ", "").split(","):
            if not tok:
                continue
            value, _, reps = tok.partition("x")
            try:
                out.extend([int(value)] * (int(reps) if reps else 1))
            except ValueError:
                raise ValueError(f"cannot parse L-vector token {tok!r}") from None
        return cls(tuple(out))

    @property
    def n(self) -> int:
        return len(self.limits)

    @property
    def L(self) -> int:
        return self.limits[-1]

    def __getitem__(self, m):
        """1-based stage access: ``lvec[m] == L_m``."""
        if not 1 <= m <= self.n:
            raise IndexError(f"stage {m} outside [1, {self.n}]")
        return self.limits[m - 1]

    def __len__(self):
        return self.n


def _as_lvector(lvec) -> LVector:
    if isinstance(lvec, LVector):
        return lvec
    if isinstance(lvec, str):
        return LVector.parse(lvec)
    return LVector(tuple(lvec))


def survivor_schedule(n: int, lvec) -> np.ndarray:
    """Number of paths kept after each decoding level.

    Level ``i`` sits on a stage-``m`` sub-graph boundary with
    ``m = n - f(i + 1)``; the last level keeps ``L_n``.
    """
    lvec = _as_lvector(lvec)
    if lvec.n != n:
        raise ValueError(f"L-vector has {lvec.n} stages, code has n={n}")
    N = 1 << n
    budgets = np.empty(N, dtype=np.int64)
    for i in range(N - 1):
        budgets[i] = lvec[n - lowest_set_bit_index(i + 1)]
    budgets[N - 1] = lvec.L
    return budgets


@dataclass(frozen=True)
class CrcCheck:
    """CRC over decisions at ``message_positions`` against ``crc_positions``.

    When ``level`` is set, the decoder filters candidates at that level.
    """

    message_positions: np.ndarray
    crc_positions: np.ndarray
    spec: CrcSpec
    level: int | None = None

    def passes(self, u) -> bool:
        u = np.asarray(u, dtype=np.uint8)
        if len(self.crc_positions) == 0:
            return True
        msg = u[self.message_positions]
        if msg.size == 0:
            return not u[self.crc_positions].any()
        return bool(np.array_equal(crc_remainder(msg, self.spec), u[self.crc_positions]))

    def passes_rows(self, rows) -> np.ndarray:
        """Vectorized ``passes`` over the rows of a 2-D decision array."""
        rows = np.ascontiguousarray(rows, dtype=np.uint8)
        if len(self.crc_positions) == 0:
            return np.ones(rows.shape[0], dtype=bool)
        if self.spec.degree > 62:
            return np.array([self.passes(r) for r in rows], dtype=bool)
        return _rows_pass(rows, np.asarray(self.message_positions, dtype=np.int64),
                          np.asarray(self.crc_positions, dtype=np.int64), self.spec.poly, self.spec.degree)


@numba.njit(cache=True)
def _rows_pass(rows, msg_pos, crc_pos, poly, r):
    out = np.empty(rows.shape[0], dtype=np.bool_)
    top = np.int64(1) << (r - 1)
    mask = (np.int64(1) << r) - 1
    for k in range(rows.shape[0]):
        reg = np.int64(0)
        for p in msg_pos:
            fb = ((reg & top) != 0) ^ (rows[k, p] != 0)
            reg = (reg << 1) & mask
            if fb:
                reg ^= poly
        good = True
        for q in range(r):
            if ((reg >> (r - 1 - q)) & 1) != rows[k, crc_pos[q]]:
                good = False
                break
        out[k] = good
    return out


@dataclass
class DecoderStats:
    llr_updates: int
    peak_banks: np.ndarray
    survivors: np.ndarray | None = None
    bank_copies: int = 0

    def peak_space_units(self) -> int:
        n = len(self.peak_banks)
        return int(sum(int(p) << (n - m) for m, p in enumerate(self.peak_banks, start=1)))

    def to_dict(self, survivors: bool = False) -> dict:
        out = {"llr_updates": int(self.llr_updates), "peak_banks": [int(v) for v in self.peak_banks]}
        if survivors and self.survivors is not None:
            out["survivors_per_level"] = [int(v) for v in self.survivors]
        return out

    def to_json(self, survivors: bool = False) -> str:
        return json.dumps(self.to_dict(survivors))


@dataclass
class DecodeResult:
    """Outcome of a list decode.

    ``paths`` holds the final list (one row of decisions per path) in list
    order and ``selected`` indexes the chosen row. ``detected_error`` is set
    when a final CRC was requested and no path passed it; ``soft_flag`` when a
    level check had no passing candidate and the budget was applied unfiltered.
    """

    code: PolarCode
    paths: np.ndarray
    metrics: np.ndarray
    selected: int
    stats: DecoderStats
    crc_pass: np.ndarray | None = None
    detected_error: bool = False
    soft_flag: bool = False
    partial_sums: np.ndarray | None = field(default=None, repr=False)

    @property
    def u_hat(self) -> np.ndarray:
        return self.paths[self.selected]

    @property
    def payload(self) -> np.ndarray:
        """Decisions on the unfrozen channels of the selected path."""
        return self.code.extract(self.u_hat)


# ---------------------------------------------------------------------------
# kernels

@numba.njit(cache=True, inline="always")
def _lsb(i):
    k = 0
    while (i & 1) == 0:
        i >>= 1
        k += 1
    return k


@numba.njit(cache=True, inline="always")
def _combine(a, b, minsum):
    if minsum:
        return boxplus_minsum(a, b)
    return boxplus(a, b)


@numba.njit(cache=True)
def _path_gamma(mem, offset, path_bank, ps, llr0, slot, i, mstart, n, minsum):
    """Refresh the stage banks of ``slot`` from ``mstart`` down; return Gamma_n^(i).

    The banks must already be writable. Takes plain arrays: passing the whole
    list state across a call costs more than the arithmetic.
    """
    updates = 0
    for m in range(mstart, n + 1):
        sz = 1 << (n - m)
        dst = offset[m] + path_bank[slot, m] * sz
        if m == 1:
            src_arr = llr0
            src = 0
        else:
            src_arr = mem
            src = offset[m - 1] + path_bank[slot, m - 1] * 2 * sz
        if i > 0 and m == mstart:
            p0 = i - sz
            for j in range(sz):
                a = src_arr[src + j]
                c = src_arr[src + sz + j]
                mem[dst + j] = c - a if ps[slot, p0 + j] else c + a
        elif minsum:
            for j in range(sz):
                mem[dst + j] = boxplus_minsum(src_arr[src + j], src_arr[src + sz + j])
        else:
            for j in range(sz):
                mem[dst + j] = boxplus(src_arr[src + j], src_arr[src + sz + j])
        updates += sz
    return mem[offset[n] + path_bank[slot, n]], updates


@numba.njit(cache=True, inline="always")
def _commit(metric_arr, dec, ps, slot, i, bit, metric, N):
    metric_arr[slot] = metric
    dec[slot, i] = bit
    ps[slot, i] = bit
    # re-encode every sub-tree that level i completes
    w = 1
    while w < N and ((i + 1) & w) == 0:
        a = i + 1 - 2 * w
        for j in range(w):
            ps[slot, a + j] ^= ps[slot, a + w + j]
        w <<= 1


@numba.njit(cache=True, inline="always")
def _candidate_passes(st, slot, i, bit, c, msg_pos, msg_off, crc_pos, crc_off, poly, deg):
    r = deg[c]
    if r == 0:
        return True
    top = np.int64(1) << (r - 1)
    mask = (np.int64(1) << r) - 1
    reg = np.int64(0)
    for q in range(msg_off[c], msg_off[c + 1]):
        p = msg_pos[q]
        b = bit if p == i else st.dec[slot, p]
        fb = ((reg & top) != 0) ^ (b != 0)
        reg = (reg << 1) & mask
        if fb:
            reg ^= poly[c]
    k = 0
    for q in range(crc_off[c], crc_off[c + 1]):
        p = crc_pos[q]
        b = bit if p == i else st.dec[slot, p]
        if ((reg >> (r - 1 - k)) & 1) != b:
            return False
        k += 1
    return True


@numba.njit(cache=True)
def _list_kernel(st, llr0, frozen, budgets, check_at, msg_pos, msg_off, crc_pos, crc_off, poly, deg,
                 minsum, survivors):
    N = llr0.size
    n = st.size.size - 1
    S = st.metric.size
    order = np.empty(S, dtype=np.int64)
    order[0] = _new_path(st)
    P = 1
    gam = np.empty(S)
    cm = np.empty(2 * S)
    cpar = np.empty(2 * S, dtype=np.int64)
    cbit = np.empty(2 * S, dtype=np.uint8)
    ok = np.empty(2 * S, dtype=np.bool_)
    rank = np.empty(2 * S, dtype=np.int64)
    pick = np.empty((S, 2), dtype=np.bool_)
    new_order = np.empty(S, dtype=np.int64)
    soft = False
    mem = st.llr
    offset = st.offset
    ref = st.ref
    path_bank = st.path_bank
    ps = st.ps
    dec = st.dec
    metric = st.metric
    updates = 0
    for i in range(N):
        mstart = 1 if i == 0 else n - _lsb(i)
        for k in range(P):
            slot = order[k]
            for m in range(mstart, n + 1):
                b = path_bank[slot, m]
                if b < 0 or ref[m, b] != 1:
                    _bank_for_write(st, slot, m)
            gam[k], du = _path_gamma(mem, offset, path_bank, ps, llr0, slot, i, mstart, n, minsum)
            updates += du
        C = 0
        for k in range(P):
            M = metric[order[k]]
            cm[C] = metric_update(M, gam[k], 0)
            cpar[C] = k
            cbit[C] = 0
            C += 1
            if not frozen[i]:
                cm[C] = metric_update(M, gam[k], 1)
                cpar[C] = k
                cbit[C] = 1
                C += 1
        c = check_at[i]
        nok = C
        if c >= 0:
            nok = 0
            for q in range(C):
                ok[q] = _candidate_passes(st, order[cpar[q]], i, cbit[q], c,
                                          msg_pos, msg_off, crc_pos, crc_off, poly, deg)
                if ok[q]:
                    nok += 1
            if nok == 0:
                soft = True
                nok = C
                for q in range(C):
                    ok[q] = True
        else:
            for q in range(C):
                ok[q] = True
        keep = min(budgets[i], nok)
        # stable insertion sort: ties fall back to (parent position, bit)
        for q in range(C):
            rank[q] = q
        for q in range(1, C):
            v = rank[q]
            j = q - 1
            while j >= 0 and cm[rank[j]] > cm[v]:
                rank[j + 1] = rank[j]
                j -= 1
            rank[j + 1] = v
        for k in range(P):
            pick[k, 0] = False
            pick[k, 1] = False
        taken = 0
        for t in range(C):
            if taken >= keep:
                break
            q = rank[t]
            if ok[q]:
                pick[cpar[q], cbit[q]] = True
                taken += 1
        for k in range(P):
            if not (pick[k, 0] or pick[k, 1]):
                _kill_path(st, order[k])
        P2 = 0
        q = 0
        for k in range(P):
            slot = order[k]
            q0 = q
            q += 1 if frozen[i] else 2
            if pick[k, 0] and pick[k, 1]:
                twin = _clone_path(st, slot, i)
                _commit(metric, dec, ps, slot, i, 0, cm[q0], N)
                _commit(metric, dec, ps, twin, i, 1, cm[q0 + 1], N)
                new_order[P2] = slot
                new_order[P2 + 1] = twin
                P2 += 2
            elif pick[k, 0]:
                _commit(metric, dec, ps, slot, i, 0, cm[q0], N)
                new_order[P2] = slot
                P2 += 1
            elif pick[k, 1]:
                _commit(metric, dec, ps, slot, i, 1, cm[q0 + 1], N)
                new_order[P2] = slot
                P2 += 1
        for k in range(P2):
            order[k] = new_order[k]
        P = P2
        survivors[i] = P
    st.counters[0] += updates
    return order[:P].copy(), soft


@numba.njit(cache=True)
def _sc_kernel(llr0, frozen, genie, use_genie, minsum, gammas):
    """Plain SC decoder; also reports every Gamma_n^(i) along the decided path."""
    N = llr0.size
    n = 0
    while (1 << n) < N:
        n += 1
    # stage m bank occupies mem[base[m] : base[m] + 2^(n-m)]
    base = np.zeros(n + 1, dtype=np.int64)
    mem = np.empty(2 * N)
    mem[:N] = llr0
    pos = N
    for m in range(1, n + 1):
        base[m] = pos
        pos += 1 << (n - m)
    u = np.zeros(N, dtype=np.uint8)
    updates = 0
    for i in range(N):
        mstart = 1 if i == 0 else n - _lsb(i)
        for m in range(mstart, n + 1):
            sz = 1 << (n - m)
            src = base[m - 1]
            dst = base[m]
            if i > 0 and m == mstart:
                # partial sums: re-encode the sz decisions preceding i
                ps = u[i - sz:i].copy()
                h = sz >> 1
                while h >= 1:
                    for blk in range(0, sz, 2 * h):
                        for j in range(h):
                            ps[blk + j] ^= ps[blk + h + j]
                    h >>= 1
                for j in range(sz):
                    mem[dst + j] = g_update(mem[src + j], mem[src + sz + j], ps[j])
            else:
                for j in range(sz):
                    mem[dst + j] = _combine(mem[src + j], mem[src + sz + j], minsum)
            updates += sz
        gam = mem[base[n]]
        gammas[i] = gam
        if use_genie:
            u[i] = genie[i]
        elif frozen[i]:
            u[i] = 0
        else:
            u[i] = 0 if gam > 0 else 1
    return u, updates


# ---------------------------------------------------------------------------
# public API

def _check_llrs(llrs, code: PolarCode) -> np.ndarray:
    llrs = np.ascontiguousarray(llrs, dtype=np.float64)
    if llrs.ndim != 1 or llrs.size != code.N:
        raise ValueError(f"dimension mismatch: got {llrs.shape} LLRs for a length-{code.N} code")
    if not np.all(np.isfinite(llrs)):
        raise ValueError("channel LLRs must be finite")
    return llrs


def sc_decode(llrs, code: PolarCode, minsum: bool = False, with_stats: bool = False):
    """Successive-cancellation decisions ``u_hat`` (frozen bits are 0).

    With ``with_stats`` also returns ``(gammas, llr_updates)``.
    """
    llrs = _check_llrs(llrs, code)
    gammas = np.empty(code.N)
    dummy = np.zeros(code.N, dtype=np.uint8)
    u, updates = _sc_kernel(llrs, code.frozen_mask, dummy, False, minsum, gammas)
    if with_stats:
        return u, gammas, int(updates)
    return u


def genie_sc_llrs(llrs, u) -> np.ndarray:
    """Gamma_n^(i) for every level i along the given decision path ``u``."""
    llrs = np.ascontiguousarray(llrs, dtype=np.float64)
    u = np.ascontiguousarray(u, dtype=np.uint8)
    if llrs.size != u.size or llrs.size & (llrs.size - 1):
        raise ValueError("llrs and u must share a power-of-two length")
    gammas = np.empty(llrs.size)
    frozen = np.zeros(llrs.size, dtype=np.bool_)
    _sc_kernel(llrs, frozen, u, True, False, gammas)
    return gammas


def _check_tables(checks, N):
    check_at = np.full(N, -1, dtype=np.int64)
    msg, crc, msg_off, crc_off, poly, deg = [], [], [0], [0], [], []
    for c, chk in enumerate(checks):
        if chk.level is None or not 0 <= chk.level < N:
            raise ValueError(f"level check needs a level in [0, {N}), got {chk.level}")
        if check_at[chk.level] >= 0:
            raise ValueError(f"two checks attached to level {chk.level}")
        if chk.spec.degree > 62:
            raise ValueError("level checks support CRC degrees up to 62")
        if len(chk.crc_positions) not in (0, chk.spec.degree):
            raise ValueError(f"check at level {chk.level} has {len(chk.crc_positions)} CRC positions "
                             f"for a degree-{chk.spec.degree} polynomial")
        positions = np.concatenate([chk.message_positions, chk.crc_positions])
        if positions.size and positions.max() > chk.level:
            raise ValueError(f"check at level {chk.level} reads decisions beyond that level")
        check_at[chk.level] = c
        msg.extend(int(p) for p in chk.message_positions)
        crc.extend(int(p) for p in chk.crc_positions)
        msg_off.append(len(msg))
        crc_off.append(len(crc))
        poly.append(chk.spec.poly)
        deg.append(len(chk.crc_positions))
    as_i64 = lambda v: np.asarray(v, dtype=np.int64)  # noqa: E731
    return check_at, as_i64(msg), as_i64(msg_off), as_i64(crc), as_i64(crc_off), as_i64(poly), as_i64(deg)


def list_decode(llrs, code: PolarCode, lvec, budgets=None, checks=(), final_check: CrcCheck | None = None,
                minsum: bool = False) -> DecodeResult:
    """Run the shared list kernel.

    Parameters
    ----------
    llrs : array_like
        Channel LLRs, length ``code.N``.
    code : PolarCode
    lvec : LVector or sequence of int
        Stage bank limits; the memory pool is sized from them.
    budgets : array_like of int, optional
        Paths kept after each level. Defaults to ``survivor_schedule``.
    checks : sequence of CrcCheck
        Level checks applied to candidates before the budget.
    final_check : CrcCheck, optional
        Selects the best final path passing it.
    """
    llrs = _check_llrs(llrs, code)
    lvec = _as_lvector(lvec)
    n, N = code.n, code.N
    if lvec.n != n:
        raise ValueError(f"L-vector has {lvec.n} stages, code has n={n}")
    if budgets is None:
        budgets = survivor_schedule(n, lvec)
    budgets = np.ascontiguousarray(budgets, dtype=np.int64)
    if budgets.shape != (N,) or budgets.min() < 1 or budgets.max() > lvec.L:
        raise ValueError("budgets must give 1..L_n survivors for each of the N levels")
    st = new_list_arrays(n, lvec.limits)
    tables = _check_tables(list(checks), N)
    survivors = np.zeros(N, dtype=np.int64)
    order, soft = _list_kernel(st, llrs, code.frozen_mask, budgets, *tables, minsum, survivors)
    paths = st.dec[order].copy()
    metrics = st.metric[order].copy()
    stats = DecoderStats(
        llr_updates=int(st.counters[0]),
        peak_banks=st.peak[1:].copy(),
        survivors=survivors,
        bank_copies=int(st.counters[1]),
    )
    crc_pass = None
    detected = False
    selected = int(np.argmin(metrics))
    if final_check is not None:
        crc_pass = final_check.passes_rows(paths)
        if crc_pass.any():
            cand = np.flatnonzero(crc_pass)
            selected = int(cand[np.argmin(metrics[cand])])
        else:
            detected = True
    return DecodeResult(
        code=code,
        paths=paths,
        metrics=metrics,
        selected=selected,
        stats=stats,
        crc_pass=crc_pass,
        detected_error=detected,
        soft_flag=bool(soft),
        partial_sums=st.ps[order].copy(),
    )


def single_crc_check(code: PolarCode, spec) -> CrcCheck:
    """CRC over ``u_A``: the trailing ``r`` unfrozen bits carry the CRC."""
    spec = get_crc(spec)
    A = code.unfrozen_array
    r = spec.degree
    if r >= A.size:
        raise ValueError(f"code has {A.size} unfrozen channels, too few for a degree-{r} CRC")
    return CrcCheck(A[: A.size - r], A[A.size - r:], spec)


def scl_decode(llrs, code: PolarCode, L: int, final_crc=None, minsum: bool = False) -> DecodeResult:
    """SCL with list size ``L``; optional CRC-aided selection over ``u_A``."""
    if L < 1:
        raise ValueError(f"list size must be >= 1, got {L}")
    final = single_crc_check(code, final_crc) if final_crc is not None else None
    budgets = np.full(code.N, L, dtype=np.int64)
    return list_decode(llrs, code, LVector.uniform(code.n, L), budgets=budgets, final_check=final, minsum=minsum)


def rscl_decode(llrs, code: PolarCode, lvec, final_crc=None, minsum: bool = False) -> DecodeResult:
    """R-SCL: level ``i`` keeps ``L_m`` paths with ``m = n - f(i + 1)``."""
    final = single_crc_check(code, final_crc) if final_crc is not None else None
    return list_decode(llrs, code, lvec, final_check=final, minsum=minsum)
