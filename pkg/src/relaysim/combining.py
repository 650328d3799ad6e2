"""Destination combining: exact ML over sub-blocks, plus MRC, MMSE and C-MRC.

The ML combiner works on groups of k = lcm(s, r) coded bits, covered by
k_s = k/s source symbols and k_r = k/r relay symbols, and marginalizes the
relay's decoding errors through the per-symbol prior Pr[x1 | x1~].  The
linear combiners collapse both observations into one equivalent Gaussian
channel and demap that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .channel import LinkRealization
from .modem import Constellation, demap_llrs, llrs_from_point_logliks, _point_logliks
from .relay import RelayErrorPrior

__all__ = [
    "SubblockGeometry",
    "CombinerKind",
    "EquivalentChannel",
    "subblock_geometry",
    "ml_block_llrs",
    "ml_sequence_llrs",
    "relay_correlation",
    "combiner_weights",
    "linear_combine",
    "equivalent_channel_llrs",
    "bpsk_ml_path_metric",
]

MAX_SUBBLOCK_BITS = 8


@dataclass(frozen=True)
class SubblockGeometry:
    """Sub-block sizes tying s-bit source labels to r-bit relay labels."""

    s: int
    r: int
    k: int
    k_s: int
    k_r: int


def subblock_geometry(s: int, r: int) -> SubblockGeometry:
    if s < 1 or r < 1:
        raise ValueError("bits per symbol must be positive")
    k = math.lcm(s, r)
    if k > MAX_SUBBLOCK_BITS:
        raise ValueError(f"k = lcm({s},{r}) = {k} exceeds the supported bound {MAX_SUBBLOCK_BITS}")
    return SubblockGeometry(s=s, r=r, k=k, k_s=k // s, k_r=k // r)


class CombinerKind(str, Enum):
    ML = "ml"
    MRC = "mrc"
    MMSE = "mmse"
    CMRC = "cmrc"


@dataclass(frozen=True)
class EquivalentChannel:
    """Linear-combiner output model y = w0*y0 + w1*y1 = h_eq*sqrt(P0)*x + z_eq."""

    w0: complex
    w1: complex
    h_eq: float
    sigma_eq_sq: float
    rho1: float
    alpha1_sq: float
    p0: float = 1.0

    def __post_init__(self) -> None:
        if self.sigma_eq_sq <= 0:
            raise ValueError("sigma_eq_sq must be positive")


@lru_cache(maxsize=None)
def _pattern_tables(k: int, s: int, r: int):
    """Label indices of each k-bit pattern's source and relay symbols (MSB-first)."""
    patterns = np.arange(1 << k)
    k_s, k_r = k // s, k // r
    src_idx = np.empty((1 << k, k_s), dtype=np.intp)
    for u in range(k_s):
        src_idx[:, u] = (patterns >> (k - (u + 1) * s)) & ((1 << s) - 1)
    rel_idx = np.empty((1 << k, k_r), dtype=np.intp)
    for v in range(k_r):
        rel_idx[:, v] = (patterns >> (k - (v + 1) * r)) & ((1 << r) - 1)
    return src_idx, rel_idx


def _mix_relay_logliks(rel_raw: np.ndarray, prior_matrix: np.ndarray) -> np.ndarray:
    """ln sum_x1 Pr[x1|x1~] p(y1|x1) for every intended x1~, from raw tables.

    rel_raw: (..., k_r, M1) log densities per transmitted point; prior_matrix
    broadcastable against it as a stack of (M1, M1) rows-sum-to-1 matrices.
    Max-factored so high-SNR tables do not underflow.
    """
    m = rel_raw.max(axis=-1, keepdims=True)
    e = np.exp(rel_raw - m)
    mixed = e @ np.swapaxes(prior_matrix, -1, -2)
    # a p=0 prior row whose only support underflowed would give log(0); clamp
    # to the smallest normal instead -- such terms sit ~700 nats below the
    # dominant hypothesis and cannot move any LLR, but -inf would poison the
    # decoder's branch metrics
    return m + np.log(np.maximum(mixed, np.finfo(np.float64).tiny))


def _ml_llrs_core(y0, y1, gain0, sigma0_sq, gain1, sigma1_sq, prior_matrix,
                  geom: SubblockGeometry, source_const: Constellation,
                  relay_const: Constellation) -> np.ndarray:
    """Per-coded-bit LLRs for sub-block shaped inputs.

    y0: (..., n, k_s) source observations, y1: (..., n, k_r) relay
    observations; gains broadcastable against them (e.g. (B, 1, 1) for a
    batch of blocks); prior_matrix (M1, M1) or a (..., 1, M1, M1) stack.
    Returns (..., n, k).  Per-symbol likelihood tables are built once and
    gathered across the 2^k hypotheses.
    """
    src_ll = _point_logliks(y0, gain0, sigma0_sq, source_const.points)
    rel_raw = _point_logliks(y1, gain1, sigma1_sq, relay_const.points)
    rel_mixed = _mix_relay_logliks(rel_raw, prior_matrix)

    src_idx, rel_idx = _pattern_tables(geom.k, geom.s, geom.r)
    scores = (
        src_ll[..., np.arange(geom.k_s), src_idx].sum(axis=-1)
        + rel_mixed[..., np.arange(geom.k_r), rel_idx].sum(axis=-1)
    )
    return llrs_from_point_logliks(scores, geom.k)


def _check_pair(geom: SubblockGeometry, source_const: Constellation,
                relay_const: Constellation) -> None:
    if geom.s != source_const.bits_per_symbol or geom.r != relay_const.bits_per_symbol:
        raise ValueError("geometry does not match the constellation pair")


def ml_block_llrs(y0_block, y1_block, link: LinkRealization, prior: RelayErrorPrior,
                  geom: SubblockGeometry, source_const: Constellation,
                  relay_const: Constellation) -> np.ndarray:
    """Exact ML bit LLRs for one aligned sub-block: k_s source + k_r relay symbols.

    For each of the k coded bits, log-sum-exp of the joint likelihood over the
    bit patterns with that bit 1 minus those with it 0, marginalizing relay
    decoding errors through the prior.
    """
    _check_pair(geom, source_const, relay_const)
    y0 = np.asarray(y0_block, dtype=complex)
    y1 = np.asarray(y1_block, dtype=complex)
    if y0.shape != (geom.k_s,) or y1.shape != (geom.k_r,):
        raise ValueError(f"expected {geom.k_s} source and {geom.k_r} relay symbols, "
                         f"got {y0.shape} and {y1.shape}")
    out = _ml_llrs_core(
        y0[None, :], y1[None, :],
        link.h0 * np.sqrt(link.p0), link.sigma0_sq,
        link.h1 * np.sqrt(link.p1), link.sigma1_sq,
        prior.matrix, geom, source_const, relay_const,
    )
    return out[0]


def ml_sequence_llrs(y0, y1, link: LinkRealization, prior: RelayErrorPrior,
                     geom: SubblockGeometry, source_const: Constellation,
                     relay_const: Constellation) -> np.ndarray:
    """ML bit LLRs for whole blocks: y0 (..., T), y1 (..., T1) -> (..., s*T)."""
    _check_pair(geom, source_const, relay_const)
    y0 = np.asarray(y0)
    y1 = np.asarray(y1)
    if y0.shape[-1] % geom.k_s or y1.shape[-1] % geom.k_r \
            or y0.shape[-1] // geom.k_s != y1.shape[-1] // geom.k_r:
        raise ValueError("source/relay lengths not aligned to the sub-block geometry")
    n = y0.shape[-1] // geom.k_s
    out = _ml_llrs_core(
        y0.reshape(*y0.shape[:-1], n, geom.k_s),
        y1.reshape(*y1.shape[:-1], n, geom.k_r),
        link.h0 * np.sqrt(link.p0), link.sigma0_sq,
        link.h1 * np.sqrt(link.p1), link.sigma1_sq,
        prior.matrix, geom, source_const, relay_const,
    )
    return out.reshape(*y0.shape[:-1], n * geom.k)


def relay_correlation(prior: RelayErrorPrior, relay_const: Constellation) -> float:
    """rho1 = |E[x1 * conj(x1~)]| under the error prior and uniform intended symbols."""
    pts = relay_const.points
    return float(abs(np.mean((prior.matrix @ pts) * np.conj(pts))))


def combiner_weights(kind: CombinerKind, link: LinkRealization, gamma1p: float,
                     gamma1: float, rho1: float, alpha1_sq: float = 1.0,
                     cmrc_linear_variance: bool = True) -> EquivalentChannel:
    """Equivalent channel gain, noise variance and branch weights per combiner.

    gamma1p and gamma1 are the source-relay and relay-destination SNRs used by
    C-MRC's scaling factor; rho1 is the source/relay symbol correlation used
    by MMSE.  cmrc_linear_variance scales C-MRC's relay noise term by lambda
    itself (the conventional form); the alternative scales it by lambda^2,
    consistent with w1 applied to the noise.
    """
    kind = CombinerKind(kind)
    a0 = abs(link.h0) ** 2
    a1 = abs(link.h1) ** 2
    s0, s1 = link.sigma0_sq, link.sigma1_sq
    if kind is CombinerKind.MRC:
        h_eq = a0 / s0 + a1 / s1
        return EquivalentChannel(w0=np.conj(link.h0) / s0, w1=np.conj(link.h1) / s1,
                                 h_eq=h_eq, sigma_eq_sq=h_eq, rho1=rho1,
                                 alpha1_sq=alpha1_sq, p0=link.p0)
    if kind is CombinerKind.MMSE:
        denom = s1 + a1 * link.p0 * (alpha1_sq - rho1 ** 2)
        h_eq = a0 / s0 + a1 * rho1 ** 2 / denom
        return EquivalentChannel(w0=np.conj(link.h0) / s0,
                                 w1=rho1 * np.conj(link.h1) / denom,
                                 h_eq=h_eq, sigma_eq_sq=h_eq, rho1=rho1,
                                 alpha1_sq=alpha1_sq, p0=link.p0)
    if kind is CombinerKind.CMRC:
        lam = 1.0 if gamma1 <= gamma1p else gamma1p / gamma1  # min{g1p, g1}/g1
        sigma_eq = a0 * s0 + (lam if cmrc_linear_variance else lam ** 2) * a1 * s1
        return EquivalentChannel(w0=np.conj(link.h0), w1=lam * np.conj(link.h1),
                                 h_eq=a0 + lam * a1, sigma_eq_sq=sigma_eq, rho1=rho1,
                                 alpha1_sq=alpha1_sq, p0=link.p0)
    raise ValueError(f"{kind.value} is not a linear combiner")


def linear_combine(y0, y1, eq: EquivalentChannel):
    """Combined observation w0*y0 + w1*y1 of the equivalent channel."""
    return eq.w0 * np.asarray(y0) + eq.w1 * np.asarray(y1)


def equivalent_channel_llrs(y, eq: EquivalentChannel, c: Constellation) -> np.ndarray:
    """Bit LLRs of combined symbols under y = h_eq*sqrt(P0)*x + z_eq."""
    return demap_llrs(np.asarray(y), eq.h_eq * np.sqrt(eq.p0), eq.sigma_eq_sq, c)


def bpsk_ml_path_metric(y0, y1, link: LinkRealization, p: float, coded_bits) -> float:
    """Closed-form BPSK path metric (lower is better), relay errors marginalized.

    mu = sum_t |y0 - h0 sqrt(P0) x|^2/sigma0^2
         - ln[ (1-p) e^{-|y1 - h1 sqrt(P1) x|^2/sigma1^2}
               + p e^{-|y1 + h1 sqrt(P1) x|^2/sigma1^2} ]
    with x = 1 - 2b.  Test oracle for ml_block_llrs-driven decoding.
    """
    if not 0.0 <= p <= 0.5:
        raise ValueError("p must lie in [0, 0.5]")
    y0 = np.asarray(y0)
    y1 = np.asarray(y1)
    bits = np.asarray(coded_bits)
    if y0.shape != y1.shape or y0.shape != bits.shape:
        raise ValueError("BPSK metric needs equal-length y0, y1 and coded bits")
    x = 1.0 - 2.0 * bits.astype(np.float64)
    g0 = link.h0 * np.sqrt(link.p0)
    g1 = link.h1 * np.sqrt(link.p1)
    t0 = np.abs(y0 - g0 * x) ** 2 / link.sigma0_sq
    with np.errstate(divide="ignore"):
        keep = np.log1p(-p) - np.abs(y1 - g1 * x) ** 2 / link.sigma1_sq
        flip = np.log(p) - np.abs(y1 + g1 * x) ** 2 / link.sigma1_sq
    return float(np.sum(t0 - np.logaddexp(keep, flip)))
