"""Scalar LLR arithmetic shared by every decoder."""
import math

import numba
import numpy as np

__all__ = ["boxplus", "boxplus_minsum", "g_update", "metric_update", "softplus"]


@numba.njit(cache=True, inline="always")
def boxplus(a, b):
    """ln((e^(a+b) + 1) / (e^a + e^b)), evaluated without overflow."""
    s = np.sign(a) * np.sign(b) * min(abs(a), abs(b))
    return s + math.log1p(math.exp(-abs(a + b))) - math.log1p(math.exp(-abs(a - b)))


@numba.njit(cache=True, inline="always")
def boxplus_minsum(a, b):
    return np.sign(a) * np.sign(b) * min(abs(a), abs(b))


@numba.njit(cache=True, inline="always")
def g_update(a, b, partial_sum):
    """b + a when the partial sum is 0, b - a when it is 1."""
    return b - a if partial_sum else b + a


@numba.njit(cache=True, inline="always")
def softplus(x):
    """ln(1 + e^x)."""
    return max(x, 0.0) + math.log1p(math.exp(-abs(x)))


@numba.njit(cache=True, inline="always")
def metric_update(metric, llr, decision):
    """Add the penalty ln(1 + exp(-(-1)^decision * llr)); smaller metrics are better."""
    return metric + softplus(llr if decision else -llr)
