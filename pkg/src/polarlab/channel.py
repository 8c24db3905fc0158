"""BPSK over AWGN and the channel LLRs fed to the decoders."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["ChannelConfig", "channel_llr", "modulate", "noise_variance", "transmit", "trial_rng"]


def noise_variance(ebno_db: float, code_rate: float) -> float:
    """sigma^2 of the real AWGN for unit-energy BPSK at the given Eb/N0."""
    return 1.0 / (2.0 * code_rate * 10.0 ** (ebno_db / 10.0))


@dataclass(frozen=True)
class ChannelConfig:
    """Eb/N0 operating point.

    ``code_rate`` counts message bits only; CRC bits are overhead.
    Pass ``sigma2`` to pin the noise variance directly.
    """

    ebno_db: float = 0.0
    code_rate: float = 0.5
    seed: int = 0
    sigma2: float | None = None

    def __post_init__(self):
        if not 0.0 < self.code_rate <= 1.0:
            raise ValueError(f"code_rate must be in (0, 1], got {self.code_rate}")
        if self.sigma2 is None:
            object.__setattr__(self, "sigma2", noise_variance(self.ebno_db, self.code_rate))
        if not self.sigma2 > 0.0:
            raise ValueError(f"noise variance must be positive, got {self.sigma2}")

    @property
    def noise_variance(self) -> float:
        return self.sigma2


def trial_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``(seed, *key)``, e.g. ``(seed, snr_index, trial)``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


def modulate(x) -> np.ndarray:
    """BPSK: bit 0 -> +1.0, bit 1 -> -1.0."""
    x = np.asarray(x)
    if x.size and not np.all((x == 0) | (x == 1)):
        raise ValueError("modulate expects bits in {0, 1}")
    return 1.0 - 2.0 * x.astype(np.float64)


def transmit(symbols, cfg: ChannelConfig, rng: np.random.Generator | None = None) -> np.ndarray:
    """Add i.i.d. N(0, sigma^2) noise.

    Without ``rng`` the noise comes from a fresh generator seeded by
    ``cfg.seed``, so repeated calls give the same output.
    """
    symbols = np.asarray(symbols, dtype=np.float64)
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    return symbols + rng.normal(0.0, np.sqrt(cfg.sigma2), symbols.shape)


def channel_llr(received, cfg: ChannelConfig) -> np.ndarray:
    """ln W(y|0)/W(y|1) = 2 y / sigma^2."""
    return 2.0 * np.asarray(received, dtype=np.float64) / cfg.sigma2
