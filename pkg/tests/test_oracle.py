import itertools

import numpy as np
import pytest

from polarlab.channel import ChannelConfig
from polarlab.oracle import channel_log_likelihood, wn_probability_oracle
from polarlab.polar import kron_encode


def gauss(y, x, var):
    s = 1.0 - 2.0 * x
    return np.exp(-((y - s) ** 2) / (2 * var)) / np.sqrt(2 * np.pi * var)


def test_single_channel_reduces_to_w():
    cfg = ChannelConfig(sigma2=0.8)
    for y in (-1.3, 0.0, 0.4):
        assert wn_probability_oracle([y], [], 0, cfg, 0) == pytest.approx(gauss(y, 0, 0.8))
        assert wn_probability_oracle([y], [], 1, cfg, 0) == pytest.approx(gauss(y, 1, 0.8))


@pytest.mark.parametrize("n", [1, 2])
def test_marginals_sum_to_joint(n):
    # summing W_n^(i) over u_i and every prefix gives sum_u W_n(y|u) / 2^(N-1)
    N = 1 << n
    cfg = ChannelConfig(sigma2=1.1)
    y = np.random.default_rng(n).normal(size=N)
    total = sum(np.exp(channel_log_likelihood(y, kron_encode(np.array(u), n), cfg))
                for u in itertools.product((0, 1), repeat=N)) / 2 ** (N - 1)
    for i in range(N):
        acc = 0.0
        for prefix in itertools.product((0, 1), repeat=i):
            acc += sum(wn_probability_oracle(y, prefix, b, cfg, n) for b in (0, 1))
        assert acc == pytest.approx(total, rel=1e-12)


def test_log_likelihood_matches_density():
    cfg = ChannelConfig(sigma2=0.6)
    y = np.array([0.2, -1.0, 1.7])
    x = np.array([0, 1, 1])
    assert channel_log_likelihood(y, x, cfg) == pytest.approx(np.log(np.prod(gauss(y, x, 0.6))))


def test_refuses_large_n():
    with pytest.raises(ValueError, match="refuses"):
        wn_probability_oracle(np.zeros(32), [], 0, ChannelConfig(), 5)


def test_argument_errors():
    cfg = ChannelConfig()
    with pytest.raises(ValueError):
        wn_probability_oracle(np.zeros(3), [], 0, cfg, 2)
    with pytest.raises(ValueError):
        wn_probability_oracle(np.zeros(2), [0, 1], 0, cfg, 1)
    with pytest.raises(ValueError):
        wn_probability_oracle(np.zeros(2), [], 2, cfg, 1)
