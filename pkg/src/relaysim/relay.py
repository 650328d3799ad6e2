"""Decode-and-forward relay processing and residual-BER calibration."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channel import LinkRealization
from .codec import ConvCode, Interleaver, conv_encode, deinterleave, interleave, viterbi_decode
from .modem import Constellation, demap_llrs, map_bits

__all__ = [
    "ResidualBerTable",
    "RelayErrorPrior",
    "relay_decode_forward",
    "calibrate_residual_ber",
    "lookup_p",
    "error_prior",
]

CSV_HEADER = ("gamma_sr_db", "p")


@dataclass(frozen=True, eq=False)
class ResidualBerTable:
    """Coded-bit error rate of the relay's re-encoded stream vs source-relay SNR."""

    gamma_sr_db: np.ndarray
    p: np.ndarray

    def __post_init__(self) -> None:
        g = np.asarray(self.gamma_sr_db, dtype=float)
        p = np.asarray(self.p, dtype=float)
        if g.ndim != 1 or g.size == 0 or g.shape != p.shape:
            raise ValueError("table needs matching non-empty gamma and p columns")
        if np.any(np.diff(g) <= 0):
            raise ValueError("gamma grid must be strictly increasing")
        if np.any((p < 0) | (p > 0.5)):
            raise ValueError("p values must lie in [0, 0.5]")
        object.__setattr__(self, "gamma_sr_db", g)
        object.__setattr__(self, "p", p)

    def save_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for g, p in zip(self.gamma_sr_db, self.p):
                w.writerow([f"{g:g}", f"{p:.10e}"])

    @classmethod
    def load_csv(cls, path) -> "ResidualBerTable":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or tuple(rows[0]) != CSV_HEADER:
            raise ValueError(f"{path}: expected CSV header {','.join(CSV_HEADER)}")
        data = np.array([[float(a), float(b)] for a, b in rows[1:]])
        if data.size == 0:
            raise ValueError(f"{path}: table has no rows")
        return cls(gamma_sr_db=data[:, 0], p=data[:, 1])


@dataclass(frozen=True, eq=False)
class RelayErrorPrior:
    """Pr[x1 | intended x1~] under independent label-bit flips with probability p.

    matrix[v, w] = p^d (1-p)^(r-d) with d the Hamming distance between labels
    v (intended) and w (transmitted).
    """

    matrix: np.ndarray
    p: float

    @property
    def log_matrix(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.matrix)


def error_prior(relay_const: Constellation, p: float) -> RelayErrorPrior:
    if not 0.0 <= p <= 0.5:
        raise ValueError("p must lie in [0, 0.5]")
    r = relay_const.bits_per_symbol
    labels = np.arange(relay_const.size)
    d = np.bitwise_count(labels[:, None] ^ labels[None, :])
    matrix = np.float_power(p, d) * np.float_power(1.0 - p, r - d)
    matrix.setflags(write=False)
    return RelayErrorPrior(matrix=matrix, p=float(p))


def lookup_p(table: ResidualBerTable, gamma_db: float) -> float:
    """Piecewise-linear interpolation in (dB, p), clamped to the grid ends."""
    return float(np.interp(gamma_db, table.gamma_sr_db, table.p))


def relay_decode_forward(y_sr: np.ndarray, link: LinkRealization, code: ConvCode,
                         il: Interleaver, source_const: Constellation,
                         relay_const: Constellation) -> np.ndarray:
    """Demap, decode, re-encode and re-modulate one received block (or a batch).

    Returns the relay's transmit symbols, length T1 = s*T/r per block.
    """
    s, r = source_const.bits_per_symbol, relay_const.bits_per_symbol
    n_coded = il.length
    if n_coded % r:
        raise ValueError(f"coded length {n_coded} is not divisible by r={r}")
    y_sr = np.asarray(y_sr)
    if y_sr.shape[-1] * s != n_coded:
        raise ValueError("received block length does not match the coded length")
    gain = link.h1p * np.sqrt(link.p0)
    llrs = demap_llrs(y_sr, gain, link.sigma_sr_sq, source_const)
    decoded = viterbi_decode(deinterleave(llrs, il), code)
    coded = interleave(conv_encode(decoded, code), il)
    return map_bits(coded, relay_const)


def _pav_non_increasing(y: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Weighted least-squares fit of a non-increasing sequence (pool adjacent violators)."""
    blocks: list[list[float]] = []  # [mean, weight, count]
    for val, wt in zip(y, w):
        blocks.append([float(val), float(wt), 1])
        while len(blocks) > 1 and blocks[-2][0] < blocks[-1][0]:
            v1, w1, c1 = blocks.pop()
            v0, w0, c0 = blocks.pop()
            blocks.append([(v0 * w0 + v1 * w1) / (w0 + w1), w0 + w1, c0 + c1])
    out = np.empty(len(y))
    i = 0
    for val, _, count in blocks:
        out[i:i + count] = val
        i += count
    return out


def calibrate_residual_ber(gamma_grid_db, min_info_bits: int, seed: int, code: ConvCode,
                           il: Interleaver, source_const: Constellation,
                           batch_blocks: int = 32) -> ResidualBerTable:
    """Measure the relay's residual coded-bit error rate over a source-relay SNR grid.

    Simulates source->relay transmission and DF processing with at least
    min_info_bits information bits per grid point, then applies an isotonic
    (non-increasing) correction so the table is monotone in gamma'.
    """
    grid = np.atleast_1d(np.asarray(gamma_grid_db, dtype=float))
    if grid.size == 0:
        raise ValueError("calibration grid is empty")
    if min_info_bits < 10_000:
        raise ValueError("need at least 10^4 info bits per grid point")
    s = source_const.bits_per_symbol
    q, nu = code.rate_denominator, code.memory
    if il.length % q or il.length % s:
        raise ValueError("interleaver length incompatible with code rate or modulation")
    length = il.length // q - nu
    if length < 1:
        raise ValueError("interleaver too short for this code")
    n_blocks = -(-min_info_bits // length)

    rates = np.empty(grid.size)
    counts = np.empty(grid.size)
    for gi, gamma_db in enumerate(grid):
        sigma_sq = link_sigma = 1.0 / 10.0 ** (gamma_db / 10.0)
        if not np.isfinite(link_sigma) or link_sigma == 0.0:
            sigma_sq = 1e-30  # realizes a gamma' = +inf (noiseless) grid point
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(gi,)))
        wrong = 0
        done = 0
        while done < n_blocks:
            nb = min(batch_blocks, n_blocks - done)
            msgs = rng.integers(0, 2, size=(nb, length), dtype=np.uint8)
            coded = interleave(conv_encode(msgs, code), il)
            x = map_bits(coded, source_const)
            scale = np.sqrt(sigma_sq / 2.0)
            y = x + scale * (rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape))
            llrs = demap_llrs(y, 1.0, sigma_sq, source_const)
            decoded = viterbi_decode(deinterleave(llrs, il), code)
            recoded = interleave(conv_encode(decoded, code), il)
            wrong += int(np.count_nonzero(recoded != coded))
            done += nb
        counts[gi] = done * il.length
        rates[gi] = wrong / counts[gi]

    p = _pav_non_increasing(np.minimum(rates, 0.5), counts)
    return ResidualBerTable(gamma_sr_db=grid, p=np.clip(p, 0.0, 0.5))
