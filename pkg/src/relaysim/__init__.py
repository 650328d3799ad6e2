"""Link-level simulator for the orthogonal decode-and-forward relay channel.

Implements exact maximum-likelihood combining of the source and relay
observations for arbitrary (possibly different) modulations, the MRC, MMSE
and C-MRC linear reference combiners, and a Monte Carlo BER harness with
residual-BER calibration of the relay's decoding errors.
"""

from .channel import LinkRealization, awgn_transmit, draw_block_fading, snr_db_to_noise_var
from .codec import (
    ConvCode,
    Interleaver,
    conv_encode,
    deinterleave,
    exhaustive_ml_decode,
    interleave,
    make_interleaver,
    viterbi_decode,
)
from .combining import (
    CombinerKind,
    EquivalentChannel,
    SubblockGeometry,
    bpsk_ml_path_metric,
    combiner_weights,
    equivalent_channel_llrs,
    linear_combine,
    ml_block_llrs,
    ml_sequence_llrs,
    relay_correlation,
    subblock_geometry,
)
from .harness import BerResult, SimConfig, run_ber_point, run_sweep, write_csv
from .modem import Constellation, demap_llrs, log_symbol_likelihood, make_constellation, map_bits
from .relay import (
    RelayErrorPrior,
    ResidualBerTable,
    calibrate_residual_ber,
    error_prior,
    lookup_p,
    relay_decode_forward,
)

__version__ = "0.1.0"

__all__ = [
    "BerResult",
    "CombinerKind",
    "Constellation",
    "ConvCode",
    "EquivalentChannel",
    "Interleaver",
    "LinkRealization",
    "RelayErrorPrior",
    "ResidualBerTable",
    "SimConfig",
    "SubblockGeometry",
    "awgn_transmit",
    "bpsk_ml_path_metric",
    "calibrate_residual_ber",
    "combiner_weights",
    "conv_encode",
    "deinterleave",
    "demap_llrs",
    "draw_block_fading",
    "equivalent_channel_llrs",
    "error_prior",
    "exhaustive_ml_decode",
    "interleave",
    "linear_combine",
    "log_symbol_likelihood",
    "lookup_p",
    "make_constellation",
    "make_interleaver",
    "map_bits",
    "ml_block_llrs",
    "ml_sequence_llrs",
    "relay_correlation",
    "relay_decode_forward",
    "run_ber_point",
    "run_sweep",
    "snr_db_to_noise_var",
    "subblock_geometry",
    "viterbi_decode",
    "write_csv",
]
