import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarlab.polar import (
    ConstructionSpec,
    PolarCode,
    bhattacharyya_bec,
    construct_frozen_set,
    format_frozen_set,
    gaussian_approx_means,
    kron_encode,
    lowest_set_bit_index,
    msb_truncate,
    parse_frozen_set,
    read_frozen_set,
    write_frozen_set,
)


def explicit_generator(n):
    """G_2^{(x)n} built with np.kron; independent of the butterfly encoder."""
    G = np.array([[1]], dtype=np.int64)
    for _ in range(n):
        G = np.kron(G, np.array([[1, 0], [1, 1]]))
    return G


def bits_strategy(max_n=10):
    return st.integers(1, max_n).flatmap(
        lambda n: st.tuples(st.just(n), st.lists(st.integers(0, 1), min_size=1 << n, max_size=1 << n))
    )


# ---------------------------------------------------------------------------
# kron_encode

@pytest.mark.parametrize("u, n, x", [
    ([1, 0], 1, [1, 0]),
    ([1, 1], 1, [0, 1]),
    ([0, 0, 0, 1], 2, [1, 1, 1, 1]),
])
def test_kron_encode_small(u, n, x):
    assert kron_encode(u, n).tolist() == x


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_kron_encode_matches_matrix(n):
    G = explicit_generator(n)
    rng = np.random.default_rng(n)
    for _ in range(20):
        u = rng.integers(0, 2, 1 << n)
        assert np.array_equal(kron_encode(u, n), (u @ G) % 2)


def test_kron_encode_does_not_touch_input():
    u = np.array([1, 0, 1, 1], dtype=np.uint8)
    kron_encode(u, 2)
    assert u.tolist() == [1, 0, 1, 1]


def test_kron_encode_length_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        kron_encode([1, 0, 1], 2)


def test_kron_encode_rejects_non_bits():
    with pytest.raises(ValueError):
        kron_encode([0, 2], 1)


@settings(max_examples=60, deadline=None)
@given(bits_strategy())
def test_kron_encode_involution(case):
    n, u = case
    u = np.array(u, dtype=np.uint8)
    assert np.array_equal(kron_encode(kron_encode(u, n), n), u)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.data())
def test_kron_encode_linear(n, data):
    N = 1 << n
    u = np.array(data.draw(st.lists(st.integers(0, 1), min_size=N, max_size=N)), dtype=np.uint8)
    v = np.array(data.draw(st.lists(st.integers(0, 1), min_size=N, max_size=N)), dtype=np.uint8)
    assert np.array_equal(kron_encode(u ^ v, n), kron_encode(u, n) ^ kron_encode(v, n))


# ---------------------------------------------------------------------------
# index helpers

@pytest.mark.parametrize("i, f", [(40, 3), (1, 0), (12, 2), (2048, 11)])
def test_lowest_set_bit_index(i, f):
    assert lowest_set_bit_index(i) == f


def test_lowest_set_bit_index_rejects_zero():
    with pytest.raises(ValueError):
        lowest_set_bit_index(0)


@given(st.integers(0, 40), st.integers(0, 10**6))
def test_lowest_set_bit_index_of_shifted_odd(a, k):
    assert lowest_set_bit_index((2 * k + 1) << a) == a


@pytest.mark.parametrize("i, m, n, out", [(5, 1, 3, 4), (5, 3, 3, 5), (5, 0, 3, 0), (7, 0, 3, 0), (6, 2, 3, 6)])
def test_msb_truncate(i, m, n, out):
    assert msb_truncate(i, m, n) == out


def test_msb_truncate_bad_args():
    with pytest.raises(ValueError):
        msb_truncate(1, 4, 3)
    with pytest.raises(ValueError):
        msb_truncate(8, 1, 3)


@given(st.integers(1, 12).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, (1 << n) - 1),
                                                     st.integers(0, n))))
def test_msb_truncate_keeps_top_bits(case):
    n, i, m = case
    # oracle: clear the n - m low bits one at a time
    out = i
    for j in range(n - m):
        out &= ~(1 << j)
    assert msb_truncate(i, m, n) == out


# ---------------------------------------------------------------------------
# construction

def test_bec_bhattacharyya_values():
    assert np.allclose(bhattacharyya_bec(2, 0.5), [0.9375, 0.5625, 0.4375, 0.0625])


@pytest.mark.parametrize("k, A", [(1, [3]), (2, [2, 3]), (3, [1, 2, 3]), (4, [0, 1, 2, 3])])
def test_bec_construction_n2(k, A):
    spec = ConstructionSpec("bhattacharyya_bec", 0.5)
    assert construct_frozen_set(2, k, spec).tolist() == A


@pytest.mark.parametrize("method", ["bhattacharyya_bec", "gaussian_approx_awgn", "monte_carlo"])
def test_full_rate_takes_everything(method):
    param = 0.5 if method == "bhattacharyya_bec" else 2.0
    spec = ConstructionSpec(method, param, trials=50)
    assert construct_frozen_set(2, 4, spec).tolist() == [0, 1, 2, 3]


def test_ties_prefer_larger_index():
    # at erasure 1e-300 every squared term underflows, so Z = [4e-300, 0, 0, 0]
    spec = ConstructionSpec("bhattacharyya_bec", 1e-300)
    Z = bhattacharyya_bec(2, 1e-300)
    assert Z[1] == Z[2] == Z[3] == 0.0
    assert construct_frozen_set(2, 1, spec).tolist() == [3]
    assert construct_frozen_set(2, 2, spec).tolist() == [2, 3]


def test_gaussian_approx_orders_last_channel_best():
    mu = gaussian_approx_means(5, 2.0, 0.5)
    assert np.argmax(mu) == 31
    assert np.argmin(mu) == 0
    assert np.all(np.isfinite(mu))


def test_construction_is_deterministic():
    spec = ConstructionSpec("monte_carlo", 2.0, trials=100, seed=3)
    assert np.array_equal(construct_frozen_set(4, 8, spec), construct_frozen_set(4, 8, spec))


@pytest.mark.parametrize("method, param", [("bhattacharyya_bec", 0.3), ("gaussian_approx_awgn", 1.0)])
def test_construction_nested(method, param):
    spec = ConstructionSpec(method, param)
    n = 7
    prev = set()
    for k in range(1, (1 << n) + 1):
        A = set(construct_frozen_set(n, k, spec).tolist())
        assert prev <= A and len(A) == k
        prev = A


@pytest.mark.parametrize("k", [0, 9, -1])
def test_construct_k_out_of_range(k):
    with pytest.raises(ValueError):
        construct_frozen_set(3, k, ConstructionSpec())


def test_construction_spec_validation():
    with pytest.raises(ValueError):
        ConstructionSpec("bhattacharyya_bec", 1.5)
    with pytest.raises(ValueError):
        ConstructionSpec("nope")


# ---------------------------------------------------------------------------
# PolarCode

def test_polar_code_fields():
    code = PolarCode(3, (3, 5, 6, 7))
    assert code.N == 8 and code.k == 4
    assert code.frozen == (0, 1, 2, 4)
    assert code.frozen_mask.tolist() == [True, True, True, False, True, False, False, False]
    u = code.place([1, 0, 1, 1])
    assert u.tolist() == [0, 0, 0, 1, 0, 0, 1, 1]
    assert code.extract(u).tolist() == [1, 0, 1, 1]
    assert np.array_equal(code.encode([1, 0, 1, 1]), kron_encode(u, 3))


@pytest.mark.parametrize("A", [(3, 2), (0, 8), (1, 1), (-1,)])
def test_polar_code_rejects_bad_sets(A):
    with pytest.raises(ValueError):
        PolarCode(3, A)


def test_place_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        PolarCode(2, (2, 3)).place([1])


def test_frozen_set_file_round_trip(tmp_path):
    spec = ConstructionSpec()
    code = PolarCode.construct(6, 20, spec)
    path = tmp_path / "code.txt"
    write_frozen_set(path, code, spec)
    text = path.read_text()
    assert text.splitlines()[0] == "# polar n=6 k=20 method=gaussian_approx_awgn param=2.0"
    assert [int(v) for v in text.splitlines()[1:]] == list(code.unfrozen)
    assert read_frozen_set(path) == code


def test_frozen_set_file_errors():
    with pytest.raises(ValueError):
        parse_frozen_set("0\n1\n")
    with pytest.raises(ValueError):
        parse_frozen_set("# polar n=2 k=3 method=gaussian_approx_awgn param=2.0\n0\n1\n")
    code = PolarCode(2, (1, 3))
    assert parse_frozen_set(format_frozen_set(code)) == code
