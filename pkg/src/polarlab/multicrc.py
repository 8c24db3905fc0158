"""
Multi-CRC polar codes: one message sub-block per run of ``2**(n-s)`` bit
channels, each followed by its own CRC, with the last CRC covering the whole
message.

Block ``j`` owns ``A_j = A & [j * W, (j + 1) * W)`` with ``W = 2**(n-s)``. Its
first ``K_j = |A_j| - r_j`` channels carry message bits and the trailing
``r_j`` carry ``CRC_j``. Blocks ``j < M - 1`` are checked locally as soon as
the decoder passes their last channel; the final block's CRC is computed over
the concatenated message and is only checked at the end.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .crc import BUILTIN_CRCS, CrcSpec, crc_remainder, get_crc
from .decoder import CrcCheck, DecodeResult, _as_lvector, list_decode
from .polar import PolarCode, _as_bits

__all__ = ["MultiCrcLayout", "build_layout", "multicrc_encode", "multicrc_rscl_decode"]


@dataclass(frozen=True)
class MultiCrcLayout:
    """Sub-block partition of a code's unfrozen set.

    Attributes
    ----------
    s : int
        ``M = 2**s`` sub-blocks.
    r_vec : tuple of int
        CRC length per block; the last entry is the global CRC.
    crc_specs : tuple of CrcSpec or None
        ``None`` where ``r_j = 0``.
    blocks : tuple of ndarray
        ``A_j``, ascending channel indices.
    K : tuple of int
        Message bits per block.
    """

    n: int
    s: int
    r_vec: tuple
    crc_specs: tuple
    blocks: tuple
    K: tuple

    @property
    def M(self) -> int:
        return 1 << self.s

    @property
    def width(self) -> int:
        return 1 << (self.n - self.s)

    @property
    def message_length(self) -> int:
        return sum(self.K)

    def boundary(self, j: int) -> int:
        """Last level of block ``j``."""
        return (j + 1) * self.width - 1

    def message_positions(self, j: int) -> np.ndarray:
        return self.blocks[j][: self.K[j]]

    def crc_positions(self, j: int) -> np.ndarray:
        return self.blocks[j][self.K[j]:]

    def local_checks(self) -> list:
        """Level checks for blocks ``0..M-2`` that carry a CRC."""
        out = []
        for j in range(self.M - 1):
            if self.r_vec[j] > 0:
                out.append(CrcCheck(self.message_positions(j), self.crc_positions(j), self.crc_specs[j],
                                    level=self.boundary(j)))
        return out

    def global_check(self) -> CrcCheck | None:
        last = self.M - 1
        if self.r_vec[last] == 0:
            return None
        msg = np.concatenate([self.message_positions(j) for j in range(self.M)])
        return CrcCheck(msg, self.crc_positions(last), self.crc_specs[last])


def build_layout(code: PolarCode, s: int, r_vec, crc_specs=None) -> MultiCrcLayout:
    """Split ``code``'s unfrozen set into ``2**s`` CRC-protected sub-blocks.

    Parameters
    ----------
    code : PolarCode
    s : int
        ``1 <= s <= n``.
    r_vec : sequence of int
        CRC length per block, ``2**s`` entries.
    crc_specs : sequence, optional
        Generator per block (CrcSpec, name or polynomial string). Defaults to
        the built-in CRC of each degree.

    Raises
    ------
    ValueError
        On bad dimensions or when a block has fewer channels than its CRC.
    """
    n = code.n
    if not 1 <= s <= n:
        raise ValueError(f"s must be in [1, {n}], got {s}")
    M = 1 << s
    r_vec = tuple(int(r) for r in r_vec)
    if len(r_vec) != M:
        raise ValueError(f"r_vec needs {M} entries for s={s}, got {len(r_vec)}")
    if any(r < 0 for r in r_vec):
        raise ValueError("CRC lengths must be non-negative")
    if crc_specs is None:
        specs = []
        for j, r in enumerate(r_vec):
            if r == 0:
                specs.append(None)
            elif r in BUILTIN_CRCS:
                specs.append(BUILTIN_CRCS[r])
            else:
                raise ValueError(f"block {j}: no built-in CRC of degree {r}; give crc_specs")
    else:
        if len(crc_specs) != M:
            raise ValueError(f"crc_specs needs {M} entries, got {len(crc_specs)}")
        specs = [None if r == 0 and c is None else get_crc(c) for r, c in zip(r_vec, crc_specs)]
        for j, (r, c) in enumerate(zip(r_vec, specs)):
            if r > 0 and (c is None or c.degree != r):
                raise ValueError(f"block {j}: CRC length {r} does not match the polynomial degree")
            if r == 0 and c is not None:
                raise ValueError(f"block {j}: r=0 but a polynomial was given")
    A = code.unfrozen_array
    W = 1 << (n - s)
    blocks, K = [], []
    for j in range(M):
        blk = A[(A >= j * W) & (A < (j + 1) * W)]
        if blk.size < r_vec[j]:
            raise ValueError(f"block {j} has {blk.size} unfrozen channels, cannot host a {r_vec[j]}-bit CRC")
        blk.setflags(write=False)
        blocks.append(blk)
        K.append(int(blk.size - r_vec[j]))
    return MultiCrcLayout(n=n, s=s, r_vec=r_vec, crc_specs=tuple(specs), blocks=tuple(blocks), K=tuple(K))


def _crc_bits(bits: np.ndarray, spec: CrcSpec | None) -> np.ndarray:
    if spec is None:
        return np.zeros(0, dtype=np.uint8)
    if bits.size == 0:
        # an empty message leaves the register at zero
        return np.zeros(spec.degree, dtype=np.uint8)
    return crc_remainder(bits, spec)


def _check_layout(layout: MultiCrcLayout, code: PolarCode):
    if layout.n != code.n:
        raise ValueError(f"layout is for n={layout.n}, code has n={code.n}")
    if sum(b.size for b in layout.blocks) != code.k:
        raise ValueError("layout does not partition this code's unfrozen set")


def multicrc_encode(message, layout: MultiCrcLayout, code: PolarCode) -> np.ndarray:
    """Input vector ``u`` carrying ``[a_0, c_0, ..., a_{M-1}, c_{M-1}]`` on ``A``.

    ``c_j`` is the CRC of ``a_j`` for ``j < M - 1``; the last CRC covers the
    whole message. Apply ``kron_encode`` to the result to get the codeword.
    """
    _check_layout(layout, code)
    a = _as_bits(message, "message")
    if a.size != layout.message_length:
        raise ValueError(f"dimension mismatch: layout carries {layout.message_length} message bits, got {a.size}")
    u = np.zeros(code.N, dtype=np.uint8)
    start = 0
    for j in range(layout.M):
        aj = a[start: start + layout.K[j]]
        start += layout.K[j]
        cj = _crc_bits(a if j == layout.M - 1 else aj, layout.crc_specs[j])
        u[layout.message_positions(j)] = aj
        u[layout.crc_positions(j)] = cj
    return u


def multicrc_message(u, layout: MultiCrcLayout) -> np.ndarray:
    """Concatenated message bits read back from ``u``."""
    u = np.asarray(u, dtype=np.uint8)
    return np.concatenate([u[layout.message_positions(j)] for j in range(layout.M)])


@dataclass
class MultiCrcDecodeResult:
    message: np.ndarray
    detected_error: bool
    soft_flag: bool
    result: DecodeResult

    @property
    def stats(self):
        return self.result.stats


def multicrc_rscl_decode(llrs, code: PolarCode, layout: MultiCrcLayout, lvec, minsum: bool = False):
    """R-SCL with local CRC pruning at sub-block boundaries.

    At the last level of block ``j < M - 1`` only candidates whose block payload
    passes ``CRC_j`` compete for the usual R-SCL budget there, which equals
    ``L_{s - f(j+1)}``. If none pass, the budget is filled regardless and
    ``soft_flag`` is set. The returned path is the best one passing the global
    CRC; if none does, the best path overall with ``detected_error`` set.

    Returns
    -------
    MultiCrcDecodeResult
        ``message``, ``detected_error``, ``soft_flag`` and the underlying
        ``DecodeResult`` with its instrumentation.
    """
    _check_layout(layout, code)
    lvec = _as_lvector(lvec)
    res = list_decode(llrs, code, lvec, checks=layout.local_checks(), final_check=layout.global_check(),
                      minsum=minsum)
    return MultiCrcDecodeResult(
        message=multicrc_message(res.u_hat, layout),
        detected_error=res.detected_error,
        soft_flag=res.soft_flag,
        result=res,
    )
