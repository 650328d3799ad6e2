"""Gray-labeled constellations and Gaussian symbol likelihoods."""

from __future__ import annotations

from dataclasses import dataclass

from functools import lru_cache

import numpy as np

__all__ = [
    "Constellation",
    "make_constellation",
    "map_bits",
    "log_symbol_likelihood",
    "demap_llrs",
]


@dataclass(frozen=True, eq=False)
class Constellation:
    """Unit-energy constellation with Gray labels.

    points[v] is the symbol whose label is the integer v read MSB-first from
    its bits_per_symbol label bits.
    """

    name: str
    points: np.ndarray
    bits_per_symbol: int

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def labels(self) -> np.ndarray:
        return np.arange(self.size)


# 2-bit Gray code along one 16-QAM axis: 00, 01, 11, 10 -> -3, -1, +1, +3
_QAM16_AXIS = {0b00: -3.0, 0b01: -1.0, 0b11: 1.0, 0b10: 3.0}


def _build(name: str) -> Constellation:
    if name == "bpsk":
        points = np.array([1.0 + 0.0j, -1.0 + 0.0j])
        s = 1
    elif name == "qpsk":
        # bit 0 sets the sign of the in-phase axis, bit 1 the quadrature axis;
        # 00 -> e^{j pi/4}, Gray-adjacent around the circle
        points = np.empty(4, dtype=complex)
        for v in range(4):
            re = 1.0 if (v >> 1) == 0 else -1.0
            im = 1.0 if (v & 1) == 0 else -1.0
            points[v] = (re + 1j * im) / np.sqrt(2.0)
        s = 2
    elif name == "qam16":
        # first two label bits pick the in-phase level, last two the quadrature
        points = np.empty(16, dtype=complex)
        for v in range(16):
            points[v] = (_QAM16_AXIS[v >> 2] + 1j * _QAM16_AXIS[v & 3]) / np.sqrt(10.0)
        s = 4
    else:
        raise ValueError(f"unknown constellation {name!r} (expected bpsk, qpsk or qam16)")
    points.setflags(write=False)
    return Constellation(name=name, points=points, bits_per_symbol=s)


_CACHE = {n: _build(n) for n in ("bpsk", "qpsk", "qam16")}


def make_constellation(name: str) -> Constellation:
    key = str(name).lower()
    if key == "4qam":
        key = "qpsk"
    if key not in _CACHE:
        raise ValueError(f"unknown constellation {name!r} (expected bpsk, qpsk or qam16)")
    return _CACHE[key]


def map_bits(bits: np.ndarray, c: Constellation) -> np.ndarray:
    """Map bits (MSB-first per label) to symbols; accepts (N,) or batched (B, N)."""
    arr = np.asarray(bits, dtype=np.int64)
    s = c.bits_per_symbol
    if arr.shape[-1] % s:
        raise ValueError(f"bit count {arr.shape[-1]} is not a multiple of s={s}")
    grouped = arr.reshape(*arr.shape[:-1], arr.shape[-1] // s, s)
    weights = 1 << np.arange(s - 1, -1, -1)
    return c.points[grouped @ weights]


def log_symbol_likelihood(y, h, sigma_sq: float, x):
    """Circular-Gaussian log density -ln(pi*sigma^2) - |y - h*x|^2 / sigma^2."""
    sigma_sq = float(sigma_sq)
    if sigma_sq <= 0:
        raise ValueError("sigma_sq must be positive")
    resid = np.abs(np.asarray(y) - np.asarray(h) * np.asarray(x)) ** 2
    return -np.log(np.pi * sigma_sq) - resid / sigma_sq


def _point_logliks(y: np.ndarray, gain, sigma_sq, points: np.ndarray) -> np.ndarray:
    """Log density table over all constellation points, shape y.shape + (M,).

    gain and sigma_sq broadcast against y (not the table): both gain a
    trailing point axis here.
    """
    resid = np.abs(y[..., None] - np.asarray(gain)[..., None] * points) ** 2
    s = np.asarray(sigma_sq)[..., None]
    return -np.log(np.pi * s) - resid / s


@lru_cache(maxsize=None)
def _bit_subsets(s: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """For each label bit j (MSB-first): the labels with that bit set / clear."""
    labels = np.arange(1 << s)
    out = []
    for j in range(s):
        on = (labels >> (s - 1 - j)) & 1 == 1
        out.append((labels[on], labels[~on]))
    return tuple(out)


def _subset_lse(table: np.ndarray, idx: np.ndarray) -> np.ndarray:
    # max factored per subset: a subset far below the global peak must still
    # come out at its own (finite) level, not underflow to -inf
    sub = table[..., idx]
    m = sub.max(axis=-1)
    return m + np.log(np.exp(sub - m[..., None]).sum(axis=-1))


def llrs_from_point_logliks(table: np.ndarray, s: int) -> np.ndarray:
    """Per-bit LLRs lambda(b=1) - lambda(b=0) from a (..., 2^s) log-likelihood table."""
    out = np.empty(table.shape[:-1] + (s,))
    for j, (on, off) in enumerate(_bit_subsets(s)):
        out[..., j] = _subset_lse(table, on) - _subset_lse(table, off)
    return out


def demap_llrs(y: np.ndarray, gain, sigma_sq, c: Constellation) -> np.ndarray:
    """Bit LLRs for y = gain*x + z, z circular Gaussian with variance sigma_sq.

    Input symbols (..., T) produce LLRs (..., T*s), symbol-major MSB-first,
    matching the bit order consumed by map_bits.  gain and sigma_sq may be
    scalars or arrays broadcastable against y (e.g. per-row values (B, 1)).
    """
    if np.any(np.asarray(sigma_sq) <= 0):
        raise ValueError("sigma_sq must be positive")
    y = np.asarray(y)
    table = _point_logliks(y, gain, sigma_sq, c.points)
    llrs = llrs_from_point_logliks(table, c.bits_per_symbol)
    return llrs.reshape(*y.shape[:-1], y.shape[-1] * c.bits_per_symbol)
