import json

import numpy as np
import pytest

from polarlab.presets import LVECTOR_PRESETS
from polarlab.sim import (
    CSV_HEADER,
    ConfigError,
    Simulator,
    complexity_report,
    load_config,
    parse_config,
    run_bler_sweep,
    worker_count,
)

BASE = {
    "code": {"n": 7, "K": 48},
    "crc": {"mode": "single", "polynomial": "x^16+x^12+x^5+1"},
    "decoder": {"type": "scl", "L": 4},
    "snr_points_db": [1.0, 3.0],
    "max_trials": 150,
    "max_block_errors": 10,
    "seed": 11,
}


def cfg_with(**over):
    data = json.loads(json.dumps(BASE))
    data.update(over)
    return data


@pytest.mark.parametrize("lvec, space, time", [
    ("32x11", 65504, 720896),
    ("L1", 48992, 659456),
    ("L7", 79840, 5816320),
])
def test_complexity_examples(lvec, space, time):
    n = 14 if lvec == "L7" else 11
    assert complexity_report(n, lvec) == (space, time)


@pytest.mark.parametrize("n, L", [(3, 1), (8, 5), (12, 16)])
def test_complexity_uniform_closed_form(n, L):
    N = 1 << n
    assert complexity_report(n, [L] * n) == (L * (N - 1), L * N * n)


def test_complexity_length_mismatch():
    with pytest.raises(ValueError):
        complexity_report(10, LVECTOR_PRESETS["L1"])


def test_sweep_deterministic_and_worker_independent():
    cfg = parse_config(BASE)
    a = run_bler_sweep(cfg)
    b = run_bler_sweep(cfg, chunk=17)
    c = run_bler_sweep(cfg, workers=2, chunk=23)
    assert a.to_csv() == b.to_csv() == c.to_csv()


def test_csv_format_and_invariants():
    res = run_bler_sweep(parse_config(BASE))
    lines = res.to_csv().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 3
    for p in res.points:
        assert p.bler == pytest.approx(p.block_errors / p.trials)
        assert 0.0 <= p.bler <= 1.0
        assert p.trials == 150 or p.block_errors == 10


def test_stopping_rule_never_undercounts():
    data = cfg_with(snr_points_db=[-2.0], max_trials=400, max_block_errors=25)
    cfg = parse_config(data)
    res = run_bler_sweep(cfg, chunk=64)
    p = res.points[0]
    assert p.block_errors == 25
    # replay trial by trial: the run stops exactly where the 25th error happens
    sim = Simulator(cfg)
    errors = 0
    for t in range(p.trials):
        errors += sim.trial(0, t)[0]
    assert errors == 25
    assert sum(sim.trial(0, t)[0] for t in range(p.trials - 1)) == 24


def test_high_snr_has_no_errors():
    res = run_bler_sweep(parse_config(cfg_with(snr_points_db=[12.0], max_trials=100)))
    assert res.points[0].block_errors == 0


@pytest.mark.parametrize("decoder, crc", [
    ({"type": "sc"}, {"mode": "none"}),
    ({"type": "scl", "L": 2}, None),
    ({"type": "rscl", "lvec": "1,1,2,2,4,4,4"}, {"mode": "single", "polynomial": "CRC-16"}),
    ({"type": "rscl", "lvec": [2, 2, 4, 4, 4, 4, 4]}, {"mode": "multi", "s": 1, "r_vec": [2, 10]}),
    ({"type": "rscl", "lvec": "4x7"}, {"mode": "multi", "s": 2, "r_vec": "r2048",
                                         "crc_polynomials": ["x^2+x+1", "x^2+x+1", "x^2+x+1",
                                                             "x^10+x^9+x^8+x^7+x^6+x^4+x^3+1"]}),
])
def test_decoder_variants_run(decoder, crc):
    res = run_bler_sweep(parse_config(cfg_with(decoder=decoder, crc=crc, snr_points_db=[8.0], max_trials=20)))
    p = res.points[0]
    assert p.block_errors == 0 and p.trials == 20
    assert p.mean_llr_updates > 0 and p.peak_space_units > 0


def test_instrumented_space_within_report():
    data = cfg_with(decoder={"type": "rscl", "lvec": "1,2,2,3,4,4,4"}, snr_points_db=[0.0], max_trials=30)
    res = run_bler_sweep(parse_config(data))
    assert res.points[0].peak_space_units <= complexity_report(7, [1, 2, 2, 3, 4, 4, 4])[0]


@pytest.mark.parametrize("mutate", [
    lambda d: d.update(snr_points_db=[]),
    lambda d: d.update(max_trials=0),
    lambda d: d["decoder"].update(type="bogus"),
    lambda d: d.update(decoder={"type": "rscl", "lvec": "4x3"}),
    lambda d: d.update(decoder={"type": "rscl", "lvec": "4,2,1,1,1,1,1"}),
    lambda d: d.update(decoder={"type": "rscl"}),
    lambda d: d["code"].update(K=200),
    lambda d: d["crc"].update(polynomial="x^2+q"),
    lambda d: d.update(crc={"mode": "multi", "s": 2, "r_vec": [2, 2]}),
    lambda d: d.update(crc={"mode": "multi", "s": 1, "r_vec": [2, 2]}),
    lambda d: d.update(crc={"mode": "triple"}),
    lambda d: d.pop("code"),
    lambda d: d["code"].update(construction={"method": "magic"}),
    lambda d: d.update(seed=-1),
])
def test_config_errors(mutate):
    data = cfg_with()
    mutate(data)
    with pytest.raises(ConfigError):
        parse_config(data)


def test_load_config_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    good = tmp_path / "good.json"
    good.write_text(json.dumps(BASE))
    assert load_config(good).K == 48


def test_worker_cap(monkeypatch):
    monkeypatch.setenv("POLARLAB_THREADS", "1")
    assert worker_count(8) == 1
    monkeypatch.setenv("POLARLAB_THREADS", "x")
    with pytest.raises(ConfigError):
        worker_count(2)
    monkeypatch.delenv("POLARLAB_THREADS")
    assert worker_count(3) == 3


def test_rate_counts_message_bits_only():
    sim = Simulator(parse_config(BASE))
    assert sim.rate == pytest.approx(48 / 128)
    assert sim.code.k == 48 + 16
    assert np.isfinite(sim.trial(0, 0)[1])
