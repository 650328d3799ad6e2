"""Rayleigh block fading and AWGN for the source, relay and cooperative links."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LinkRealization",
    "draw_block_fading",
    "snr_db_to_noise_var",
    "awgn_transmit",
]


@dataclass(frozen=True)
class LinkRealization:
    """One block's channel state: gains of the three links plus noise variances.

    h0: source-destination, h1: relay-destination, h1p: source-relay.
    Average SNRs follow gamma = P/sigma^2 with E|h|^2 = 1; P is the source
    power p0 throughout.
    """

    h0: complex
    h1: complex
    h1p: complex
    sigma0_sq: float
    sigma1_sq: float
    sigma_sr_sq: float
    p0: float = 1.0
    p1: float = 1.0

    def __post_init__(self) -> None:
        for v in (self.sigma0_sq, self.sigma1_sq, self.sigma_sr_sq):
            if v <= 0:
                raise ValueError("noise variances must be positive")

    def gamma1p_inst(self) -> float:
        """Instantaneous source-relay SNR |h1'|^2 P / sigma_sr^2."""
        return abs(self.h1p) ** 2 * self.p0 / self.sigma_sr_sq

    def gamma1_inst(self) -> float:
        """Instantaneous relay-destination SNR |h1|^2 P / sigma1^2."""
        return abs(self.h1) ** 2 * self.p0 / self.sigma1_sq


def draw_block_fading(rng: np.random.Generator, size=None) -> complex | np.ndarray:
    """Circular complex Gaussian gain(s) with E|h|^2 = 1; one draw per block."""
    h = (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2.0)
    return complex(h) if size is None else h


def snr_db_to_noise_var(gamma_db: float, power: float = 1.0) -> float:
    """Noise variance sigma^2 = power / 10^(gamma_db/10), using E|h|^2 = 1."""
    return power / 10.0 ** (np.asarray(gamma_db) / 10.0)


def awgn_transmit(symbols: np.ndarray, h, sigma_sq: float, power: float,
                  rng: np.random.Generator) -> np.ndarray:
    """y = h*sqrt(power)*x + z with z circular Gaussian of variance sigma_sq.

    sigma_sq = 0 is the noiseless case; h may be scalar or broadcastable
    (e.g. one gain per batch row).
    """
    if sigma_sq < 0:
        raise ValueError("sigma_sq must be non-negative")
    symbols = np.asarray(symbols)
    y = np.asarray(h) * np.sqrt(power) * symbols
    if sigma_sq > 0:
        scale = np.sqrt(sigma_sq / 2.0)
        z = scale * (rng.standard_normal(symbols.shape)
                     + 1j * rng.standard_normal(symbols.shape))
        y = y + z
    return y
