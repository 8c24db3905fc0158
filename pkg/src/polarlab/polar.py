"""
Polar code definition, frozen-set construction and the generator-matrix encoder.

Codes use the natural (non bit-reversed) ordering ``x = u G2^{(x)n}`` with
``G2 = [[1, 0], [1, 1]]``. Frozen positions always carry bit 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "ConstructionSpec",
    "PolarCode",
    "construct_frozen_set",
    "kron_encode",
    "lowest_set_bit_index",
    "msb_truncate",
    "read_frozen_set",
    "write_frozen_set",
    "format_frozen_set",
    "parse_frozen_set",
    "bhattacharyya_bec",
    "gaussian_approx_means",
]

METHODS = ("bhattacharyya_bec", "gaussian_approx_awgn", "monte_carlo")


def _as_bits(bits, name="bits"):
    arr = np.asarray(bits)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        raise ValueError(f"{name} must contain only 0/1 values")
    return arr.astype(np.uint8)


def kron_encode(u, n: int) -> np.ndarray:
    """Multiply ``u`` by the n-th Kronecker power of G2 over GF(2).

    Runs the n-stage butterfly in O(N log N) XORs.

    Parameters
    ----------
    u : array_like of {0, 1}
        Input vector of length ``2**n``.
    n : int
        Block-length exponent.

    Returns
    -------
    numpy.ndarray
        Codeword ``x`` as uint8.
    """
    x = _as_bits(u, "u").copy()
    N = 1 << n
    if x.size != N:
        raise ValueError(f"dimension mismatch: len(u)={x.size}, expected 2**{n}={N}")
    half = N >> 1
    while half >= 1:
        v = x.reshape(-1, 2, half)
        v[:, 0, :] ^= v[:, 1, :]
        half >>= 1
    return x


def lowest_set_bit_index(i: int) -> int:
    """Index of the least-significant set bit of ``i`` (``f(40) == 3``)."""
    i = int(i)
    if i <= 0:
        raise ValueError(f"lowest_set_bit_index needs i >= 1, got {i}")
    return (i & -i).bit_length() - 1


def msb_truncate(i: int, m: int, n: int) -> int:
    """Keep only the ``m`` most significant of the ``n`` bits of ``i``."""
    if not 0 <= m <= n:
        raise ValueError(f"need 0 <= m <= n, got m={m}, n={n}")
    if not 0 <= i < (1 << n):
        raise ValueError(f"need 0 <= i < 2**n, got i={i}, n={n}")
    return i & (((1 << m) - 1) << (n - m))


@dataclass(frozen=True)
class ConstructionSpec:
    """How to rank bit channels.

    ``design_parameter`` is the erasure probability for ``bhattacharyya_bec``
    and the design Eb/N0 in dB for the two AWGN methods. The AWGN noise level
    is fixed through ``design_rate`` rather than the requested dimension, so
    the ranking (and hence the nesting of unfrozen sets) does not depend on k.
    ``trials`` and ``seed`` only matter for ``monte_carlo``.
    """

    method: str = "gaussian_approx_awgn"
    design_parameter: float = 2.0
    design_rate: float = 0.5
    trials: int = 2000
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown construction method {self.method!r}; expected one of {METHODS}")
        if self.method == "bhattacharyya_bec" and not 0.0 < self.design_parameter < 1.0:
            raise ValueError(f"erasure probability must be in (0, 1), got {self.design_parameter}")
        if not math.isfinite(self.design_parameter):
            raise ValueError("design_parameter must be finite")
        if not 0.0 < self.design_rate <= 1.0:
            raise ValueError(f"design_rate must be in (0, 1], got {self.design_rate}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


def bhattacharyya_bec(n: int, erasure: float) -> np.ndarray:
    """Bhattacharyya parameters of all bit channels for a BEC(erasure).

    The most significant index bit selects the first polarization step.
    """
    z = np.array([erasure], dtype=float)
    for _ in range(n):
        z = np.stack([2 * z - z * z, z * z], axis=1).reshape(-1)
    return z


# Chung's approximation of the GA phi function, evaluated in the log domain.
_PHI_A, _PHI_B, _PHI_C = 0.4527, 0.86, 0.0218
_PHI_SWITCH = 10.0


def _log_phi(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    lo = x < _PHI_SWITCH
    xl = np.maximum(x[lo], 0.0)
    out[lo] = -_PHI_A * xl**_PHI_B + _PHI_C
    xh = x[~lo]
    out[~lo] = 0.5 * np.log(np.pi / xh) - xh / 4.0 + np.log1p(-10.0 / (7.0 * xh))
    return np.minimum(out, 0.0)


def _inv_log_phi(t):
    """Inverse of ``_log_phi`` on its decreasing branch."""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    t_switch = float(_log_phi(np.array([_PHI_SWITCH]))[0])
    closed = t >= t_switch
    out[closed] = ((_PHI_C - t[closed]) / _PHI_A) ** (1.0 / _PHI_B)
    far = ~closed
    if np.any(far):
        tt = t[far]
        lo = np.full_like(tt, _PHI_SWITCH)
        hi = np.maximum(-4.0 * tt + 50.0, 2 * _PHI_SWITCH)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            above = _log_phi(mid) > tt
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        out[far] = 0.5 * (lo + hi)
    return out


def gaussian_approx_means(n: int, ebno_db: float, rate: float) -> np.ndarray:
    """Mean LLR of every bit channel under the Gaussian approximation (BPSK/AWGN)."""
    sigma2 = 1.0 / (2.0 * rate * 10.0 ** (ebno_db / 10.0))
    mu = np.array([2.0 / sigma2])
    for _ in range(n):
        # 1 - (1 - phi)^2 = phi (2 - phi)
        lp = _log_phi(mu)
        minus = _inv_log_phi(lp + np.log(2.0 - np.exp(lp)))
        mu = np.stack([minus, 2.0 * mu], axis=1).reshape(-1)
    return mu


def _monte_carlo_reliability(n: int, spec: ConstructionSpec):
    # genie-aided SC on the all-zero codeword; lazy import avoids a cycle
    from .decoder import genie_sc_llrs

    N = 1 << n
    sigma2 = 1.0 / (2.0 * spec.design_rate * 10.0 ** (spec.design_parameter / 10.0))
    rng = np.random.default_rng(spec.seed)
    errors = np.zeros(N)
    mean_llr = np.zeros(N)
    zeros = np.zeros(N, dtype=np.uint8)
    for _ in range(spec.trials):
        y = 1.0 + rng.normal(0.0, math.sqrt(sigma2), N)
        gam = genie_sc_llrs(2.0 * y / sigma2, zeros)
        errors += gam <= 0
        mean_llr += gam
    return errors / spec.trials, mean_llr / spec.trials


def construct_frozen_set(n: int, k_unfrozen: int, spec: ConstructionSpec | None = None) -> np.ndarray:
    """Pick the ``k_unfrozen`` most reliable bit channels.

    Ties are broken in favour of the larger channel index, so the result for
    ``k`` is always a subset of the result for ``k + 1``.

    Returns
    -------
    numpy.ndarray
        Ascending int64 array of unfrozen indices.
    """
    spec = spec or ConstructionSpec()
    N = 1 << n
    if not 0 < k_unfrozen <= N:
        raise ValueError(f"k_unfrozen must be in (0, {N}], got {k_unfrozen}")
    idx = np.arange(N)
    if spec.method == "bhattacharyya_bec":
        # smaller Z is better
        order = np.lexsort((-idx, bhattacharyya_bec(n, spec.design_parameter)))
    elif spec.method == "gaussian_approx_awgn":
        mu = gaussian_approx_means(n, spec.design_parameter, spec.design_rate)
        order = np.lexsort((-idx, -mu))
    else:
        err, mean_llr = _monte_carlo_reliability(n, spec)
        order = np.lexsort((-idx, -mean_llr, err))
    return np.sort(order[:k_unfrozen]).astype(np.int64)


@dataclass(frozen=True)
class PolarCode:
    """A length ``2**n`` polar code given by its unfrozen set ``A``."""

    n: int
    unfrozen: tuple
    frozen_mask: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        A = tuple(int(a) for a in self.unfrozen)
        N = 1 << self.n
        if len(A) > N or any(a < 0 or a >= N for a in A):
            raise ValueError("unfrozen indices must lie in [0, N)")
        if any(b <= a for a, b in zip(A, A[1:])):
            raise ValueError("unfrozen indices must be strictly increasing")
        object.__setattr__(self, "unfrozen", A)
        mask = np.ones(N, dtype=np.bool_)
        mask[list(A)] = False
        mask.setflags(write=False)
        object.__setattr__(self, "frozen_mask", mask)

    @classmethod
    def construct(cls, n: int, k_unfrozen: int, spec: ConstructionSpec | None = None) -> "PolarCode":
        return cls(n, tuple(construct_frozen_set(n, k_unfrozen, spec)))

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def k(self) -> int:
        """Number of unfrozen channels (message plus CRC bits)."""
        return len(self.unfrozen)

    @property
    def frozen(self) -> tuple:
        A = set(self.unfrozen)
        return tuple(i for i in range(self.N) if i not in A)

    @property
    def unfrozen_array(self) -> np.ndarray:
        return np.asarray(self.unfrozen, dtype=np.int64)

    def place(self, bits) -> np.ndarray:
        """Map ``bits`` onto ``u_A``; frozen positions get 0."""
        bits = _as_bits(bits)
        if bits.size != self.k:
            raise ValueError(f"dimension mismatch: got {bits.size} bits for {self.k} unfrozen channels")
        u = np.zeros(self.N, dtype=np.uint8)
        u[self.unfrozen_array] = bits
        return u

    def extract(self, u) -> np.ndarray:
        return np.asarray(u, dtype=np.uint8)[..., self.unfrozen_array]

    def encode(self, bits) -> np.ndarray:
        return kron_encode(self.place(bits), self.n)


def write_frozen_set(path, code: PolarCode, spec: ConstructionSpec | None = None) -> None:
    """Write the unfrozen set, one index per line, under a ``# polar`` header."""
    Path(path).write_text(format_frozen_set(code, spec))


def format_frozen_set(code: PolarCode, spec: ConstructionSpec | None = None) -> str:
    method = spec.method if spec else "explicit"
    param = spec.design_parameter if spec else "none"
    lines = [f"# polar n={code.n} k={code.k} method={method} param={param}"]
    lines += [str(a) for a in code.unfrozen]
    return "\n".join(lines) + "\n"


def parse_frozen_set(text: str) -> PolarCode:
    header = None
    indices = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if header is None:
                header = line
            continue
        indices.append(int(line))
    if header is None or not header.startswith("# polar"):
        raise ValueError("frozen-set file lacks the '# polar n=<n> k=<k> ...' header")
    fields = dict(tok.split("=", 1) for tok in header[len("# polar"):].split() if "=" in tok)
    try:
        n, k = int(fields["n"]), int(fields["k"])
    except (KeyError, ValueError) as exc:
        raise ValueError(f"malformed frozen-set header: {header!r}") from exc
    if len(indices) != k:
        raise ValueError(f"header says k={k} but file lists {len(indices)} indices")
    return PolarCode(n, tuple(indices))


def read_frozen_set(path) -> PolarCode:
    return parse_frozen_set(Path(path).read_text())
