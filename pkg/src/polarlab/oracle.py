"""
Brute-force probability-domain references for short codes.

These enumerate input vectors, so they are only meant for checking the LLR
recursions and the path metric on ``N <= 16``.
"""
from __future__ import annotations

import numpy as np

from .channel import ChannelConfig

__all__ = ["channel_log_likelihood", "generator_matrix", "wn_log_probability", "wn_probability_oracle"]

_MAX_N = 4


def generator_matrix(n: int) -> np.ndarray:
    """G_2 Kronecker power as an explicit ``2**n x 2**n`` matrix."""
    G = np.ones((1, 1), dtype=np.int64)
    for _ in range(n):
        G = np.kron(G, np.array([[1, 0], [1, 1]], dtype=np.int64))
    return G


def channel_log_likelihood(y, x, cfg: ChannelConfig) -> float:
    """ln W^N(y | x) for BPSK over AWGN, bit 0 sent as +1."""
    y = np.asarray(y, dtype=np.float64)
    s = 1.0 - 2.0 * np.asarray(x, dtype=np.float64)
    var = cfg.sigma2
    return float(np.sum(-((y - s) ** 2) / (2.0 * var) - 0.5 * np.log(2.0 * np.pi * var)))


def wn_log_probability(y, u_prefix, u_i: int, cfg: ChannelConfig, n: int) -> float:
    """ln W_n^(i)(y, u_0^{i-1} | u_i), with ``i = len(u_prefix)``.

    Sums ``W_n(y | u)`` over every suffix ``u_{i+1}^{N-1}`` and divides by
    ``2**(N-1)``.
    """
    if n > _MAX_N:
        raise ValueError(f"brute-force oracle refuses n={n}; it enumerates 2**(2**n) inputs (n <= {_MAX_N})")
    N = 1 << n
    y = np.asarray(y, dtype=np.float64)
    if y.size != N:
        raise ValueError(f"need {N} channel outputs, got {y.size}")
    prefix = [int(b) for b in u_prefix]
    i = len(prefix)
    if i >= N:
        raise ValueError(f"prefix of length {i} leaves no bit channel in a length-{N} code")
    if u_i not in (0, 1) or any(b not in (0, 1) for b in prefix):
        raise ValueError("bits must be 0 or 1")
    r = N - i - 1
    idx = np.arange(1 << r)
    U = np.empty((idx.size, N), dtype=np.int64)
    U[:, :i] = prefix
    U[:, i] = u_i
    U[:, i + 1:] = (idx[:, None] >> np.arange(r - 1, -1, -1)) & 1
    X = (U @ generator_matrix(n)) % 2
    s = 1.0 - 2.0 * X
    var = cfg.sigma2
    terms = np.sum(-((y - s) ** 2) / (2.0 * var), axis=1) - 0.5 * N * np.log(2.0 * np.pi * var)
    return float(np.logaddexp.reduce(terms) - (N - 1) * np.log(2.0))


def wn_probability_oracle(y, u_prefix, u_i: int, cfg: ChannelConfig, n: int) -> float:
    """W_n^(i)(y, u_0^{i-1} | u_i) by direct enumeration; refuses ``n > 4``."""
    return float(np.exp(wn_log_probability(y, u_prefix, u_i, cfg, n)))
