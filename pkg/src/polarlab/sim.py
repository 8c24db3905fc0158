"""
Monte-Carlo BLER sweeps and closed-form complexity figures.

A sweep is fully determined by its config: trial ``t`` at SNR point ``p``
draws its message and noise from ``trial_rng(seed, p, t)``, so the result does
not depend on how many worker processes share the work.
"""
from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .channel import ChannelConfig, channel_llr, modulate, transmit, trial_rng
from .crc import crc_append, get_crc
from .decoder import LVector, _as_lvector, rscl_decode, sc_decode, scl_decode
from .multicrc import build_layout, multicrc_encode, multicrc_rscl_decode
from .polar import METHODS, ConstructionSpec, PolarCode, kron_encode
from .presets import RVECTOR_PRESETS

__all__ = [
    "CSV_HEADER",
    "ConfigError",
    "SimConfig",
    "SimPoint",
    "SimResult",
    "complexity_report",
    "load_config",
    "parse_config",
    "run_bler_sweep",
]

CSV_HEADER = ("snr_db", "trials", "block_errors", "bler", "mean_llr_updates", "peak_space_units")


class ConfigError(ValueError):
    """A simulation config that cannot be run."""


def complexity_report(n: int, lvec) -> tuple:
    """``(space, time)`` in LLR units: ``sum L_m 2^(n-m)`` and ``2^n sum L_m``."""
    lvec = _as_lvector(lvec)
    if lvec.n != n:
        raise ValueError(f"L-vector has {lvec.n} stages, expected {n}")
    space = sum(L << (n - m) for m, L in enumerate(lvec.limits, start=1))
    time = (1 << n) * sum(lvec.limits)
    return space, time


@dataclass(frozen=True)
class SimConfig:
    """One BLER experiment.

    ``K`` counts message bits; CRC bits are added on top, so the code has
    ``K + r`` unfrozen channels and the Eb/N0 rate is ``K / 2**n``.
    ``crc`` is ``None``, ``{"mode": "single", "polynomial": ...}`` or
    ``{"mode": "multi", "s": ..., "r_vec": ..., "crc_polynomials": ...}``.
    ``decoder`` is ``{"type": "sc"}``, ``{"type": "scl", "L": ...}`` or
    ``{"type": "rscl", "lvec": ...}``.
    """

    n: int
    K: int
    snr_points_db: tuple
    decoder: dict
    crc: dict | None = None
    construction: ConstructionSpec = field(default_factory=ConstructionSpec)
    max_trials: int = 1000
    max_block_errors: int | None = 100
    seed: int = 0

    def __post_init__(self):
        _validate(self)

    @property
    def N(self) -> int:
        return 1 << self.n

    @property
    def crc_bits(self) -> int:
        if not self.crc:
            return 0
        if self.crc["mode"] == "single":
            return get_crc(self.crc["polynomial"]).degree
        return sum(_r_vec(self.crc))

    def to_dict(self) -> dict:
        return {
            "code": {"n": self.n, "K": self.K, "construction": asdict(self.construction)},
            "crc": self.crc if self.crc else {"mode": "none"},
            "decoder": self.decoder,
            "snr_points_db": list(self.snr_points_db),
            "max_trials": self.max_trials,
            "max_block_errors": self.max_block_errors,
            "seed": self.seed,
        }


def _r_vec(crc: dict) -> tuple:
    r = crc["r_vec"]
    if isinstance(r, str):
        if r not in RVECTOR_PRESETS:
            raise ConfigError(f"unknown r_vec name {r!r}; known: {sorted(RVECTOR_PRESETS)}")
        return RVECTOR_PRESETS[r]
    return tuple(int(v) for v in r)


def _validate(cfg: SimConfig):
    if cfg.n < 1:
        raise ConfigError("code.n must be >= 1")
    if cfg.K < 1:
        raise ConfigError("code.K must be >= 1")
    if not cfg.snr_points_db:
        raise ConfigError("snr_points_db must be non-empty")
    if cfg.max_trials < 1:
        raise ConfigError("max_trials must be >= 1")
    if cfg.max_block_errors is not None and cfg.max_block_errors < 1:
        raise ConfigError("max_block_errors must be >= 1 or null")
    if cfg.seed < 0 or cfg.seed >= 1 << 64:
        raise ConfigError("seed must be a 64-bit unsigned integer")
    kind = cfg.decoder.get("type")
    if kind not in ("sc", "scl", "rscl"):
        raise ConfigError(f"decoder.type must be sc, scl or rscl, got {kind!r}")
    if kind == "scl" and int(cfg.decoder.get("L", 0)) < 1:
        raise ConfigError("scl decoder needs L >= 1")
    if kind == "rscl":
        lvec = _decoder_lvector(cfg)
        if lvec.n != cfg.n:
            raise ConfigError(f"lvec has {lvec.n} stages, code has n={cfg.n}")
    if cfg.crc:
        mode = cfg.crc.get("mode")
        if mode not in ("single", "multi"):
            raise ConfigError(f"crc.mode must be none, single or multi, got {mode!r}")
        if mode == "single" and "polynomial" not in cfg.crc:
            raise ConfigError("single CRC needs a polynomial")
        if mode == "multi":
            if kind != "rscl":
                raise ConfigError("a multi-CRC layout needs the rscl decoder")
            if "s" not in cfg.crc or "r_vec" not in cfg.crc:
                raise ConfigError("multi CRC needs s and r_vec")
    if cfg.K + cfg.crc_bits > cfg.N:
        raise ConfigError(f"K + CRC bits = {cfg.K + cfg.crc_bits} exceeds N = {cfg.N}")


def _decoder_lvector(cfg: SimConfig) -> LVector:
    try:
        return _as_lvector(cfg.decoder["lvec"])
    except KeyError:
        raise ConfigError("rscl decoder needs lvec") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad lvec: {exc}") from None


def parse_config(data: dict) -> SimConfig:
    """Build a SimConfig from the JSON schema, raising ConfigError on any problem."""
    try:
        code = data["code"]
        cons = code.get("construction", {})
        if isinstance(cons, str):
            cons = {"method": cons}
        if cons.get("method", "gaussian_approx_awgn") not in METHODS:
            raise ConfigError(f"construction.method must be one of {METHODS}")
        crc = data.get("crc") or None
        if crc is not None:
            crc = dict(crc)
            if crc.get("mode", "none") == "none":
                crc = None
        if crc and crc.get("mode") == "multi" and isinstance(crc.get("r_vec"), str):
            crc["r_vec"] = list(_r_vec(crc))
        decoder = data["decoder"]
        if isinstance(decoder, str):
            decoder = {"type": decoder}
        cfg = SimConfig(
            n=int(code["n"]),
            K=int(code["K"]),
            construction=ConstructionSpec(**cons),
            crc=crc,
            decoder=dict(decoder),
            snr_points_db=tuple(float(v) for v in data["snr_points_db"]),
            max_trials=int(data.get("max_trials", 1000)),
            max_block_errors=(None if data.get("max_block_errors", 100) is None
                              else int(data.get("max_block_errors", 100))),
            seed=int(data.get("seed", 0)),
        )
        Simulator(cfg)  # surfaces layout and CRC problems before any trial
        return cfg
    except ConfigError:
        raise
    except KeyError as exc:
        raise ConfigError(f"missing config field {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> SimConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return parse_config(data)


class Simulator:
    """Encoder, channel and decoder for one config; runs single trials."""

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        self.code = PolarCode.construct(cfg.n, cfg.K + cfg.crc_bits, cfg.construction)
        self.rate = cfg.K / cfg.N
        self.crc = None
        self.layout = None
        mode = cfg.crc["mode"] if cfg.crc else None
        if mode == "single":
            self.crc = get_crc(cfg.crc["polynomial"])
        elif mode == "multi":
            polys = cfg.crc.get("crc_polynomials")
            self.layout = build_layout(self.code, int(cfg.crc["s"]), _r_vec(cfg.crc), polys)
        kind = cfg.decoder["type"]
        self.kind = kind
        self.lvec = _decoder_lvector(cfg) if kind == "rscl" else None
        self.L = int(cfg.decoder["L"]) if kind == "scl" else None

    def encode(self, message) -> np.ndarray:
        if self.layout is not None:
            u = multicrc_encode(message, self.layout, self.code)
        elif self.crc is not None:
            u = self.code.place(crc_append(message, self.crc))
        else:
            u = self.code.place(message)
        return kron_encode(u, self.cfg.n)

    def decode(self, llr):
        """``(message_hat, llr_updates, peak_space_units)``."""
        K = self.cfg.K
        if self.layout is not None:
            res = multicrc_rscl_decode(llr, self.code, self.layout, self.lvec)
            return res.message, res.stats.llr_updates, res.stats.peak_space_units()
        if self.kind == "sc":
            u, _, updates = sc_decode(llr, self.code, with_stats=True)
            return self.code.extract(u)[:K], updates, self.cfg.N - 1
        if self.kind == "scl":
            res = scl_decode(llr, self.code, self.L, final_crc=self.crc)
        else:
            res = rscl_decode(llr, self.code, self.lvec, final_crc=self.crc)
        return res.payload[:K], res.stats.llr_updates, res.stats.peak_space_units()

    def trial(self, point: int, t: int):
        """``(block_error, llr_updates, peak_space_units)`` for trial ``t`` at SNR point ``point``."""
        rng = trial_rng(self.cfg.seed, point, t)
        message = rng.integers(0, 2, self.cfg.K, dtype=np.uint8)
        ch = ChannelConfig(self.cfg.snr_points_db[point], self.rate)
        llr = channel_llr(transmit(modulate(self.encode(message)), ch, rng), ch)
        m_hat, updates, space = self.decode(llr)
        return bool(np.any(m_hat != message)), int(updates), int(space)

    def trials(self, point: int, start: int, stop: int) -> np.ndarray:
        return np.array([self.trial(point, t) for t in range(start, stop)], dtype=np.int64).reshape(-1, 3)


@dataclass(frozen=True)
class SimPoint:
    snr_db: float
    trials: int
    block_errors: int
    bler: float
    mean_llr_updates: float
    peak_space_units: int


@dataclass
class SimResult:
    config: SimConfig
    points: list

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for p in self.points:
            w.writerow([repr(p.snr_db), p.trials, p.block_errors, f"{p.bler:.6g}", f"{p.mean_llr_updates:.6g}",
                        p.peak_space_units])
        return buf.getvalue()


_WORKER = None


def _init_worker(cfg):
    global _WORKER
    _WORKER = Simulator(cfg)


def _worker_trials(args):
    return _WORKER.trials(*args)


def worker_count(requested: int | None = None) -> int:
    """Workers to use: ``requested`` or the CPU count, capped by ``POLARLAB_THREADS``."""
    n = requested if requested is not None else (os.cpu_count() or 1)
    cap = os.environ.get("POLARLAB_THREADS")
    if cap:
        try:
            n = min(n, int(cap))
        except ValueError:
            raise ConfigError(f"POLARLAB_THREADS must be an integer, got {cap!r}") from None
    return max(1, n)


def _summarize(snr, rows, max_block_errors) -> SimPoint:
    # stop at the trial that reaches the error budget, in trial order
    if max_block_errors is not None:
        cum = np.cumsum(rows[:, 0])
        hit = np.flatnonzero(cum >= max_block_errors)
        if hit.size:
            rows = rows[: hit[0] + 1]
    T = rows.shape[0]
    errors = int(rows[:, 0].sum())
    return SimPoint(
        snr_db=float(snr),
        trials=T,
        block_errors=errors,
        bler=errors / T,
        mean_llr_updates=float(rows[:, 1].mean()),
        peak_space_units=int(rows[:, 2].max()),
    )


def run_bler_sweep(cfg: SimConfig, workers: int | None = 1, chunk: int = 200) -> SimResult:
    """Simulate every SNR point until ``max_trials`` or ``max_block_errors``.

    Trials are processed in chunks of ``chunk`` and the per-point tally is cut
    at the trial that reaches ``max_block_errors``, so worker count and chunk
    size never change the outcome.
    """
    sim = Simulator(cfg)
    workers = worker_count(workers)
    pool = ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(cfg,)) if workers > 1 else None
    points = []
    try:
        for p, snr in enumerate(cfg.snr_points_db):
            blocks = []
            done = errors = 0
            while done < cfg.max_trials and (cfg.max_block_errors is None or errors < cfg.max_block_errors):
                batch = min(chunk * workers, cfg.max_trials - done)
                if pool is None:
                    rows = sim.trials(p, done, done + batch)
                else:
                    edges = np.linspace(done, done + batch, workers + 1).astype(int)
                    jobs = [(p, int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]
                    rows = np.concatenate(list(pool.map(_worker_trials, jobs)))
                blocks.append(rows)
                done += batch
                errors += int(rows[:, 0].sum())
            points.append(_summarize(snr, np.concatenate(blocks), cfg.max_block_errors))
    finally:
        if pool is not None:
            pool.shutdown()
    return SimResult(cfg, points)
