"""
Reduced-complexity list decoding with per-stage bank limits.

An L-vector ``[L_1, ..., L_n]`` caps how many LLR banks exist at each stage
of the decoding tree. Stage ``m`` only holds ``L_m`` copies, which in turn
limits how many paths can survive at level ``i``.
"""
# %%
import numpy as np

from polarlab import CRC16, ChannelConfig, LVector, PolarCode, rscl_decode, scl_decode, survivor_schedule
from polarlab.sim import complexity_report, parse_config, run_bler_sweep

# %%
# Survivors allowed per level for a tiny n=4 tree.
print(survivor_schedule(4, [4, 5, 6, 7]))

# %%
# Space and time in LLR units: a flat list of 32 against a tapered one.
n = 11
for lv in ["32x11", "L1", "L4"]:
    space, time = complexity_report(n, lv)
    print(f"{lv:6s} limits={LVector.parse(lv).limits}  space={space:6d}  time={time}")

# %%
# The instrumented decoder counts LLR updates and peak banks per stage.
code = PolarCode.construct(10, 512 + 16)
cfg = ChannelConfig(ebno_db=1.5, code_rate=512 / 1024)
rng = np.random.default_rng(3)
u = code.place(rng.integers(0, 2, code.k, dtype=np.uint8))
y = (1.0 - 2.0 * code.encode(code.extract(u))) + rng.normal(0, np.sqrt(cfg.sigma2), code.N)
llr = 2.0 * y / cfg.sigma2

full = scl_decode(llr, code, 8)
lvec = [5, 6, 7, 7, 7, 8, 8, 8, 8, 8]
red = rscl_decode(llr, code, lvec)
print("scl(8)  updates:", full.stats.llr_updates, " peak banks:", full.stats.peak_banks)
print("rscl    updates:", red.stats.llr_updates, " peak banks:", red.stats.peak_banks)
print("bound space:", complexity_report(10, lvec)[0], " used:", red.stats.peak_space_units())

# %%
# A short sweep through the config interface. Results depend only on the
# config, not on worker count.
base = {
    "code": {"n": 8, "K": 112},
    "crc": {"mode": "single", "polynomial": "CRC-16"},
    "snr_points_db": [1.5, 2.5],
    "max_trials": 300,
    "max_block_errors": 50,
    "seed": 5,
}
for dec in [{"type": "scl", "L": 8}, {"type": "rscl", "lvec": "2,3,4,5,6,8,8,8"}]:
    res = run_bler_sweep(parse_config(dict(base, decoder=dec)))
    print(dec)
    print(res.to_csv())
