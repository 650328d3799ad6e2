"""Binary convolutional coding, pseudo-random bit interleaving and soft decoding."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "ConvCode",
    "Interleaver",
    "conv_encode",
    "make_interleaver",
    "interleave",
    "deinterleave",
    "viterbi_decode",
    "exhaustive_ml_decode",
]


@dataclass(frozen=True)
class ConvCode:
    """Rate-1/q feedforward convolutional code, zero-tail terminated.

    Generators are octal tap polynomials of length memory+1; the most
    significant tap multiplies the current input bit.
    """

    generators: tuple[int, ...] = (0o5, 0o7)
    memory: int = 2

    def __post_init__(self) -> None:
        if self.memory < 0:
            raise ValueError("memory must be non-negative")
        if len(self.generators) < 1:
            raise ValueError("need at least one generator")
        limit = 1 << (self.memory + 1)
        for g in self.generators:
            if not 0 < g < limit:
                raise ValueError(f"generator 0o{g:o} does not fit in {self.memory + 1} taps")

    @property
    def rate_denominator(self) -> int:
        return len(self.generators)

    @property
    def n_states(self) -> int:
        return 1 << self.memory

    def coded_length(self, info_length: int) -> int:
        return self.rate_denominator * (info_length + self.memory)


DEFAULT_CODE = ConvCode()


@lru_cache(maxsize=None)
def _trellis(generators: tuple[int, ...], memory: int):
    """Branch tables: for each state, the two (predecessor, input, output word) entries.

    Entry 0 of each pair is the branch whose dropped register bit is 0, so a
    strict-greater comparison during add-compare-select resolves metric ties
    toward that branch.
    """
    q = len(generators)
    n_states = 1 << memory
    pred_state = np.empty((n_states, 2), dtype=np.intp)
    pred_input = np.empty((n_states, 2), dtype=np.uint8)
    pred_word = np.empty((n_states, 2), dtype=np.intp)
    slot = np.zeros(n_states, dtype=np.intp)
    for state in range(n_states):
        for u in (0, 1):
            full = (u << memory) | state
            word = 0
            for g in generators:
                word = (word << 1) | (bin(full & g).count("1") & 1)
            nxt = full >> 1
            j = slot[nxt]
            pred_state[nxt, j] = state
            pred_input[nxt, j] = u
            pred_word[nxt, j] = word
            slot[nxt] += 1
    # word -> bit matrix, used to turn per-bit LLRs into branch metrics
    word_bits = np.zeros((q, 1 << q), dtype=np.float64)
    for w in range(1 << q):
        for j in range(q):
            word_bits[j, w] = (w >> (q - 1 - j)) & 1
    return pred_state, pred_input, pred_word, word_bits


def conv_encode(info_bits: np.ndarray, code: ConvCode = DEFAULT_CODE) -> np.ndarray:
    """Encode one message (L,) or a batch (B, L); appends the zero tail.

    Output has q*(L+memory) coded bits per message, generator-major within
    each step: bits [q*t, q*t+q) are the step-t outputs of generators in order.
    """
    arr = np.asarray(info_bits, dtype=np.uint8)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.ndim != 2 or arr.shape[1] < 1:
        raise ValueError("info_bits must be a non-empty 1-D or 2-D bit array")
    batch, length = arr.shape
    nu, q = code.memory, code.rate_denominator
    steps = length + nu
    padded = np.zeros((batch, length + 2 * nu), dtype=np.uint8)
    padded[:, nu:nu + length] = arr
    out = np.zeros((batch, steps, q), dtype=np.uint8)
    for gi, g in enumerate(code.generators):
        acc = np.zeros((batch, steps), dtype=np.uint8)
        for i in range(nu + 1):
            if (g >> (nu - i)) & 1:
                acc ^= padded[:, nu - i:nu - i + steps]
        out[:, :, gi] = acc
    coded = out.reshape(batch, steps * q)
    return coded[0] if single else coded


@dataclass(frozen=True, eq=False)
class Interleaver:
    """Seeded pseudo-random bit permutation of a coded block."""

    perm: np.ndarray
    inv_perm: np.ndarray = field(repr=False)
    seed: int = 0

    @property
    def length(self) -> int:
        return self.perm.shape[0]


def make_interleaver(length: int, seed: int) -> Interleaver:
    if length < 1:
        raise ValueError("interleaver length must be positive")
    perm = np.random.default_rng(seed).permutation(length)
    return Interleaver(perm=perm, inv_perm=np.argsort(perm), seed=seed)


def interleave(seq: np.ndarray, il: Interleaver) -> np.ndarray:
    seq = np.asarray(seq)
    if seq.shape[-1] != il.length:
        raise ValueError(f"sequence length {seq.shape[-1]} != interleaver length {il.length}")
    return seq[..., il.perm]


def deinterleave(seq: np.ndarray, il: Interleaver) -> np.ndarray:
    seq = np.asarray(seq)
    if seq.shape[-1] != il.length:
        raise ValueError(f"sequence length {seq.shape[-1]} != interleaver length {il.length}")
    return seq[..., il.inv_perm]


def viterbi_decode(llrs: np.ndarray, code: ConvCode = DEFAULT_CODE) -> np.ndarray:
    """Max-likelihood sequence decoding of per-bit LLRs, (N,) or batched (B, N).

    LLRs follow the convention llr = loglik(bit=1) - loglik(bit=0), so the
    decoder maximises sum(llr_j * bit_j) over terminated codewords.  Returns
    the L = N/q - memory information bits (tail stripped).
    """
    arr = np.asarray(llrs, dtype=np.float64)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    nu, q = code.memory, code.rate_denominator
    if arr.shape[1] % q:
        raise ValueError(f"LLR length {arr.shape[1]} is not a multiple of q={q}")
    steps = arr.shape[1] // q
    if steps <= nu:
        raise ValueError("sequence too short to contain any information bits")
    batch = arr.shape[0]
    pred_state, pred_input, pred_word, word_bits = _trellis(code.generators, code.memory)
    n_states = code.n_states

    # branch metric of word w at step t = sum of LLRs of the bits set in w
    bm = arr.reshape(batch, steps, q) @ word_bits

    metrics = np.full((batch, n_states), -np.inf)
    metrics[:, 0] = 0.0
    decisions = np.empty((steps, batch, n_states), dtype=np.int8)
    for t in range(steps):
        cand = metrics[:, pred_state] + bm[:, t, :][:, pred_word]
        choice = cand[:, :, 1] > cand[:, :, 0]
        decisions[t] = choice
        metrics = np.where(choice, cand[:, :, 1], cand[:, :, 0])

    # terminated trellis ends in the all-zero state
    state = np.zeros(batch, dtype=np.intp)
    rows = np.arange(batch)
    bits = np.empty((batch, steps), dtype=np.uint8)
    for t in range(steps - 1, -1, -1):
        e = decisions[t][rows, state]
        bits[:, t] = pred_input[state, e]
        state = pred_state[state, e]
    info = bits[:, :steps - nu]
    return info[0] if single else info


def exhaustive_ml_decode(llrs: np.ndarray, code: ConvCode, info_length: int) -> np.ndarray:
    """Brute-force metric maximisation over all 2^L messages (L <= 16)."""
    if info_length > 16:
        raise ValueError("exhaustive decoding is limited to info_length <= 16")
    if info_length < 1:
        raise ValueError("info_length must be positive")
    arr = np.asarray(llrs, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != code.coded_length(info_length):
        raise ValueError("LLR length does not match the terminated coded length")
    count = 1 << info_length
    messages = (np.arange(count)[:, None] >> np.arange(info_length - 1, -1, -1)) & 1
    codewords = conv_encode(messages.astype(np.uint8), code)
    scores = codewords @ arr
    return messages[int(np.argmax(scores))].astype(np.uint8)
