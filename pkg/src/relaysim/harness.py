"""Monte Carlo BER experiments over the relay channel: config, runner, CSV output."""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .channel import LinkRealization, snr_db_to_noise_var
from .codec import ConvCode, Interleaver, conv_encode, deinterleave, interleave, make_interleaver, viterbi_decode
from .combining import (
    CombinerKind,
    combiner_weights,
    relay_correlation,
    subblock_geometry,
    _ml_llrs_core,
)
from .modem import demap_llrs, make_constellation, map_bits
from .relay import ResidualBerTable, error_prior
from . import relay as relay_mod

__all__ = ["SimConfig", "BerResult", "run_ber_point", "run_sweep", "write_csv", "CSV_HEADER"]

CSV_HEADER = ("gamma0_db", "combiner", "mode", "ber", "ci95", "bits", "errors")

MODES = ("relay", "no-relay", "mimo-1x2")
COMBINERS = ("ml", "mrc", "mmse", "cmrc", "none")

# Trials are simulated in fixed-size batches, and the stop rule is evaluated
# every _ROUND_BATCHES batches.  Both are scheduling constants independent of
# the worker count, so counts (and the CSV) never depend on it.
_ROUND_BATCHES = 2

# Floor applied when an infinite SNR turns the noise variance into exact zero;
# keeps likelihoods finite while staying far below any signal scale.
_NOISELESS_VAR = 1e-30


@dataclass(frozen=True)
class SimConfig:
    """One experiment: modulation pair, combiner, SNR sweep and stop rule."""

    info_length: int = 1024
    code_generators: tuple[int, ...] = (0o5, 0o7)
    code_memory: int = 2
    source_mod: str = "qpsk"
    relay_mod: str = "qpsk"
    combiner: str = "ml"
    mode: str = "relay"
    gamma0_db: tuple[float, ...] = (4, 6, 8, 10, 12, 14, 16, 18, 20)
    gamma1_offset_db: float = 0.0
    gamma1p_offset_db: float = 0.0
    max_blocks: int = 4000
    target_errors: int = 100
    min_error_blocks: int = 0
    seed: int = 1
    interleaver_seed: int = 1
    calibration_table: str | None = None
    p0: float = 1.0
    p1: float = 1.0
    relay_snr_mode: str = "instantaneous"
    cmrc_variance_mode: str = "lambda"
    workers: int = 1
    batch_blocks: int = 128
    curves: tuple[tuple[str, str], ...] | None = None

    def __post_init__(self) -> None:
        if self.info_length < 1:
            raise ValueError("info_length must be positive")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.combiner not in COMBINERS:
            raise ValueError(f"combiner must be one of {COMBINERS}")
        if self.combiner == "none" and self.mode != "no-relay":
            raise ValueError("combiner 'none' is only valid in no-relay mode")
        if self.relay_snr_mode not in ("instantaneous", "average"):
            raise ValueError("relay_snr_mode must be 'instantaneous' or 'average'")
        if self.cmrc_variance_mode not in ("lambda", "lambda-sq"):
            raise ValueError("cmrc_variance_mode must be 'lambda' or 'lambda-sq'")
        if not all(np.isfinite([self.gamma1_offset_db, self.gamma1p_offset_db])):
            raise ValueError("gamma offsets must be finite")
        if len(self.gamma0_db) == 0:
            raise ValueError("gamma0_db sweep is empty")
        if self.max_blocks < 1 or self.target_errors < 1 or self.batch_blocks < 1:
            raise ValueError("max_blocks, target_errors and batch_blocks must be positive")
        if self.min_error_blocks < 0:
            raise ValueError("min_error_blocks must be non-negative")
        if self.workers < 1:
            raise ValueError("workers must be positive")
        for pair in self.curves or ():
            if len(pair) != 2:
                raise ValueError("curves entries must be (combiner, mode) pairs")
            comb, mode = pair
            if comb not in COMBINERS or mode not in MODES:
                raise ValueError(f"curve ({comb}, {mode}): combiner must be one of "
                                 f"{COMBINERS} and mode one of {MODES}")
        # Rate compatibility: each coded block must split into whole sub-blocks.
        n_coded = self.code().coded_length(self.info_length)
        geom = subblock_geometry(make_constellation(self.source_mod).bits_per_symbol,
                                 make_constellation(self.relay_mod).bits_per_symbol)
        if n_coded % geom.k:
            raise ValueError(f"coded length {n_coded} is not divisible by "
                             f"k = lcm(s, r) = {geom.k}")

    @classmethod
    def from_dict(cls, raw: dict) -> "SimConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kw = dict(raw)
        if "code_generators" in kw:
            kw["code_generators"] = _parse_generators(kw["code_generators"])
        if "gamma0_db" in kw:
            kw["gamma0_db"] = tuple(float(g) for g in kw["gamma0_db"])
        if "curves" in kw and kw["curves"] is not None:
            kw["curves"] = tuple((str(c), str(m)) for c, m in kw["curves"])
        return cls(**kw)

    @classmethod
    def from_json(cls, path) -> "SimConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def code(self) -> ConvCode:
        return ConvCode(generators=tuple(self.code_generators), memory=self.code_memory)


def _parse_generators(value) -> tuple[int, ...]:
    """Octal generator spec: "5,7", ["5", "7"] or [5, 7] (digits read as octal)."""
    if isinstance(value, str):
        parts = value.split(",")
    else:
        parts = list(value)
    return tuple(int(str(p).strip(), 8) for p in parts)


@dataclass(frozen=True)
class BerResult:
    """One simulated point of a BER curve.

    ci95 is the per-bit binomial half-width; error_blocks (how many blocks
    contained at least one error) is the honest resolution under block
    fading, where one deep fade produces hundreds of correlated bit errors.
    """

    gamma0_db: float
    combiner: str
    mode: str
    errors: int
    bits: int
    blocks: int
    error_blocks: int
    ber: float
    ci95: float
    wall_time_s: float


class _Curve:
    """Precomputed immutable state shared by every trial of one curve."""

    def __init__(self, cfg: SimConfig, combiner: str, mode: str):
        if mode == "no-relay":
            combiner = "none"
        if combiner == "none" and mode != "no-relay":
            raise ValueError("combiner 'none' is only valid in no-relay mode")
        self.cfg = cfg
        self.combiner = combiner
        self.mode = mode
        self.code = cfg.code()
        self.src_const = make_constellation(cfg.source_mod)
        self.rel_const = make_constellation(cfg.relay_mod)
        n_coded = self.code.coded_length(cfg.info_length)
        s, r = self.src_const.bits_per_symbol, self.rel_const.bits_per_symbol
        self.geom = subblock_geometry(s, r)
        if n_coded % self.geom.k:
            raise ValueError(
                f"coded length {n_coded} is not divisible by k=lcm({s},{r})={self.geom.k}")
        self.il = make_interleaver(n_coded, cfg.interleaver_seed)
        if combiner in ("mrc", "mmse", "cmrc") and cfg.source_mod != cfg.relay_mod:
            raise ValueError(f"{combiner} requires identical source and relay constellations")
        self.table: ResidualBerTable | None = None
        if mode == "relay" and combiner != "none":
            if cfg.calibration_table is None:
                raise ValueError("relay mode needs a calibration table "
                                 "(run `relaysim calibrate` and set calibration_table)")
            self.table = ResidualBerTable.load_csv(cfg.calibration_table)
        # Hamming distances between relay labels, for vectorized error priors
        labels = np.arange(self.rel_const.size)
        self._label_dist = np.bitwise_count(labels[:, None] ^ labels[None, :])

    def prior_matrices(self, p: np.ndarray) -> np.ndarray:
        """Stack of Pr[x1|x1~] matrices for per-trial flip probabilities p (B,)."""
        d = self._label_dist
        r = self.rel_const.bits_per_symbol
        pcol = p[:, None, None]
        return np.float_power(pcol, d) * np.float_power(1.0 - pcol, r - d)


def _noise(rng: np.random.Generator, shape, sigma_sq: float) -> np.ndarray:
    scale = math.sqrt(sigma_sq / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _floored_var(gamma_db: float, power: float) -> float:
    var = float(snr_db_to_noise_var(gamma_db, power))
    return var if var > 0.0 else power * _NOISELESS_VAR


def _simulate_batch(cv: _Curve, gamma_index: int, gamma0_db: float,
                    lo: int, hi: int) -> tuple[int, int, int]:
    """Simulate trials [lo, hi) of one point; returns (bit errors, error blocks, info bits)."""
    cfg = cv.cfg
    nb = hi - lo
    L = cfg.info_length
    n_coded = cv.il.length
    t_src = n_coded // cv.geom.s
    t_rel = n_coded // cv.geom.r
    sigma0 = _floored_var(gamma0_db, cfg.p0)
    sigma1 = _floored_var(gamma0_db + cfg.gamma1_offset_db, cfg.p0)
    sigma_sr = _floored_var(gamma0_db + cfg.gamma1p_offset_db, cfg.p0)

    # Each trial owns one seed stream keyed by (master seed, sweep index,
    # trial index); sub-streams keep message, fading and the three noises
    # independent, and unused draws never shift the others.
    msgs = np.empty((nb, L), dtype=np.uint8)
    h0 = np.empty(nb, dtype=complex)
    h1 = np.empty(nb, dtype=complex)
    h1p = np.empty(nb, dtype=complex)
    z_rngs = []
    for i, trial in enumerate(range(lo, hi)):
        ss = np.random.SeedSequence(cfg.seed, spawn_key=(gamma_index, trial))
        kids = ss.spawn(5)
        msgs[i] = np.random.default_rng(kids[0]).integers(0, 2, L, dtype=np.uint8)
        fad = np.random.default_rng(kids[1])
        gains = (fad.standard_normal(6) * math.sqrt(0.5)).reshape(3, 2)
        h0[i] = complex(gains[0, 0], gains[0, 1])
        h1[i] = complex(gains[1, 0], gains[1, 1])
        h1p[i] = complex(gains[2, 0], gains[2, 1])
        z_rngs.append(kids[2:])

    coded = interleave(conv_encode(msgs, cv.code), cv.il)
    x0 = map_bits(coded, cv.src_const)
    z0 = np.empty((nb, t_src), dtype=complex)
    for i, (k0, _, _) in enumerate(z_rngs):
        z0[i] = _noise(np.random.default_rng(k0), t_src, sigma0)
    y0 = h0[:, None] * math.sqrt(cfg.p0) * x0 + z0
    g0 = (h0 * math.sqrt(cfg.p0))[:, None]

    if cv.mode == "no-relay":
        llrs = demap_llrs(y0, g0, sigma0, cv.src_const)
    else:
        if cv.mode == "relay":
            y_sr = np.empty((nb, t_src), dtype=complex)
            for i, (_, ksr, _) in enumerate(z_rngs):
                y_sr[i] = _noise(np.random.default_rng(ksr), t_src, sigma_sr)
            y_sr += h1p[:, None] * math.sqrt(cfg.p0) * x0
            llr_sr = demap_llrs(y_sr, (h1p * math.sqrt(cfg.p0))[:, None], sigma_sr, cv.src_const)
            decoded = viterbi_decode(deinterleave(llr_sr, cv.il), cv.code)
            coded_rel = interleave(conv_encode(decoded, cv.code), cv.il)
        else:  # mimo-1x2: error-free relay branch
            coded_rel = coded
        x1 = map_bits(coded_rel, cv.rel_const)
        z1 = np.empty((nb, t_rel), dtype=complex)
        for i, (_, _, k1) in enumerate(z_rngs):
            z1[i] = _noise(np.random.default_rng(k1), t_rel, sigma1)
        y1 = h1[:, None] * math.sqrt(cfg.p1) * x1 + z1
        g1 = (h1 * math.sqrt(cfg.p1))[:, None]

        if cv.mode == "mimo-1x2":
            p_flip = np.zeros(nb)
            gamma1p_lin = np.full(nb, np.inf)
        elif cfg.relay_snr_mode == "instantaneous":
            gamma1p_lin = np.abs(h1p) ** 2 * cfg.p0 / sigma_sr
            with np.errstate(divide="ignore"):
                p_flip = np.interp(10.0 * np.log10(gamma1p_lin),
                                   cv.table.gamma_sr_db, cv.table.p)
        else:
            gamma1p_lin = np.full(nb, 10.0 ** ((gamma0_db + cfg.gamma1p_offset_db) / 10.0))
            p_flip = np.full(nb, np.interp(gamma0_db + cfg.gamma1p_offset_db,
                                           cv.table.gamma_sr_db, cv.table.p))

        if cv.combiner == "ml":
            priors = cv.prior_matrices(p_flip)
            n_sub = n_coded // cv.geom.k
            llrs = _ml_llrs_core(
                y0.reshape(nb, n_sub, cv.geom.k_s),
                y1.reshape(nb, n_sub, cv.geom.k_r),
                g0[:, :, None], sigma0, g1[:, :, None], sigma1,
                priors[:, None, :, :], cv.geom, cv.src_const, cv.rel_const,
            ).reshape(nb, n_coded)
        else:
            llrs = _linear_llrs(cv, y0, y1, h0, h1, sigma0, sigma1,
                                p_flip, gamma1p_lin)

    decoded = viterbi_decode(deinterleave(llrs, cv.il), cv.code)
    per_block = np.count_nonzero(decoded != msgs, axis=1)
    return int(per_block.sum()), int(np.count_nonzero(per_block)), nb * L


def _linear_llrs(cv: _Curve, y0, y1, h0, h1, sigma0, sigma1, p_flip, gamma1p_lin):
    """Per-trial Table-driven weights, combine, then demap the equivalent channel."""
    cfg = cv.cfg
    nb = h0.shape[0]
    kind = CombinerKind(cv.combiner)
    if cfg.relay_snr_mode == "instantaneous":
        gamma1_lin = np.abs(h1) ** 2 * cfg.p0 / sigma1
    else:
        gamma1_lin = np.full(nb, cfg.p0 / sigma1)  # E|h1|^2 = 1
    w0 = np.empty(nb, dtype=complex)
    w1 = np.empty(nb, dtype=complex)
    h_eq = np.empty(nb)
    sig_eq = np.empty(nb)
    for i in range(nb):
        prior = error_prior(cv.rel_const, float(p_flip[i]))
        rho1 = relay_correlation(prior, cv.rel_const)
        link = LinkRealization(h0=complex(h0[i]), h1=complex(h1[i]), h1p=0j,
                               sigma0_sq=sigma0, sigma1_sq=sigma1, sigma_sr_sq=1.0,
                               p0=cfg.p0, p1=cfg.p1)
        eq = combiner_weights(kind, link, float(gamma1p_lin[i]), float(gamma1_lin[i]),
                              rho1, alpha1_sq=1.0,
                              cmrc_linear_variance=cfg.cmrc_variance_mode == "lambda")
        w0[i], w1[i], h_eq[i], sig_eq[i] = eq.w0, eq.w1, eq.h_eq, eq.sigma_eq_sq
    y = w0[:, None] * y0 + w1[:, None] * y1
    gain = (h_eq * math.sqrt(cfg.p0))[:, None]
    return demap_llrs(y, gain, sig_eq[:, None], cv.src_const)


def run_ber_point(cfg: SimConfig, gamma0_db: float, gamma_index: int = 0,
                  curve: _Curve | None = None, executor=None) -> BerResult:
    """Simulate one sweep point until the stop rule or the block cap.

    Stops once >= target_errors bit errors have accumulated (and, when
    min_error_blocks is set, that many distinct blocks contained errors);
    max_blocks always caps the run.
    """
    cv = curve if curve is not None else _Curve(cfg, cfg.combiner, cfg.mode)
    start = time.perf_counter()
    n_batches = -(-cfg.max_blocks // cfg.batch_blocks)
    spans = [(b * cfg.batch_blocks, min((b + 1) * cfg.batch_blocks, cfg.max_blocks))
             for b in range(n_batches)]
    errors = bits = err_blocks = 0
    b = 0
    while b < len(spans):
        chunk = spans[b:b + _ROUND_BATCHES]
        if executor is not None:
            outs = list(executor.map(
                lambda span: _simulate_batch(cv, gamma_index, gamma0_db, *span), chunk))
        else:
            outs = [_simulate_batch(cv, gamma_index, gamma0_db, lo, hi) for lo, hi in chunk]
        for e, eb, nb in outs:
            errors += e
            err_blocks += eb
            bits += nb
        b += len(chunk)
        if errors >= cfg.target_errors and err_blocks >= cfg.min_error_blocks:
            break
    blocks = bits // cfg.info_length
    ber = errors / bits if bits else 0.0
    ci95 = 1.96 * math.sqrt(max(ber * (1.0 - ber), 0.0) / bits) if bits else 0.0
    return BerResult(gamma0_db=float(gamma0_db), combiner=cv.combiner, mode=cv.mode,
                     errors=errors, bits=bits, blocks=blocks, error_blocks=err_blocks,
                     ber=ber, ci95=ci95, wall_time_s=time.perf_counter() - start)


def run_sweep(cfg: SimConfig, out_path=None, progress=None) -> list[BerResult]:
    """Run every (curve, gamma0) point of the config; optionally write the CSV.

    Results are deterministic for a fixed master seed: trial scheduling is
    fixed-size-batch based and independent of the worker count.
    """
    pairs = cfg.curves if cfg.curves else ((cfg.combiner, cfg.mode),)
    curves = [_Curve(cfg, comb, mode) for comb, mode in pairs]
    executor = ThreadPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    results: list[BerResult] = []
    try:
        for cv in curves:
            for gi, g in enumerate(cfg.gamma0_db):
                res = run_ber_point(cfg, g, gamma_index=gi, curve=cv, executor=executor)
                results.append(res)
                if progress is not None:
                    progress(res)
    finally:
        if executor is not None:
            executor.shutdown()
    if out_path is not None:
        write_csv(results, out_path)
    return results


def write_csv(results: list[BerResult], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for r in results:
            w.writerow([f"{r.gamma0_db:g}", r.combiner, r.mode,
                        f"{r.ber:.10e}", f"{r.ci95:.10e}", r.bits, r.errors])
