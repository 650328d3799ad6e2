"""Session fixtures for the acceptance experiments.

The heavy sweeps are session-scoped so the figure-level criteria share one
simulation each.  Every fixture returns (results, wall_seconds) so tests can
hold the runtime budgets to account.
"""

import time

import pytest

from relaysim.codec import ConvCode, make_interleaver
from relaysim.harness import SimConfig, run_sweep
from relaysim.modem import make_constellation
from relaysim.relay import calibrate_residual_ber

# Residual-BER grid: spans the waterfall of the (5,7) code on both
# constellations, 2 dB steps, endpoints clamped by interpolation beyond.
CAL_GRID = tuple(float(g) for g in range(-10, 32, 2))
CAL_BITS = 200_000
CAL_SEED = 11


def _calibrate(mod: str, path) -> str:
    code = ConvCode()
    il = make_interleaver(code.coded_length(1024), seed=1)
    table = calibrate_residual_ber(CAL_GRID, CAL_BITS, CAL_SEED, code, il,
                                   make_constellation(mod))
    table.save_csv(path)
    return str(path)


@pytest.fixture(scope="session")
def qpsk_table_path(tmp_path_factory):
    return _calibrate("qpsk", tmp_path_factory.mktemp("cal") / "qpsk.csv")


@pytest.fixture(scope="session")
def bpsk_table_path(tmp_path_factory):
    return _calibrate("bpsk", tmp_path_factory.mktemp("cal") / "bpsk.csv")


def _timed_sweep(cfg: SimConfig):
    start = time.perf_counter()
    results = run_sweep(cfg)
    return results, time.perf_counter() - start


@pytest.fixture(scope="session")
def fig_equal_mods(qpsk_table_path):
    """5-curve 4-QAM/4-QAM sweep, gamma1' = gamma1 = gamma0, 4..20 dB."""
    cfg = SimConfig(
        info_length=1024,
        source_mod="qpsk", relay_mod="qpsk",
        gamma0_db=tuple(float(g) for g in range(4, 22, 2)),
        curves=(("none", "no-relay"), ("mrc", "relay"), ("mmse", "relay"),
                ("cmrc", "relay"), ("ml", "relay")),
        calibration_table=qpsk_table_path,
        seed=1,
        target_errors=100, min_error_blocks=35, max_blocks=90_000,
    )
    return _timed_sweep(cfg)


@pytest.fixture(scope="session")
def fig_equal_mods_mid(qpsk_table_path):
    """High-resolution rerun of the two mid-SNR points used for curve ordering."""
    cfg = SimConfig(
        info_length=1024,
        source_mod="qpsk", relay_mod="qpsk",
        gamma0_db=(6.0, 10.0),
        curves=(("none", "no-relay"), ("mrc", "relay"), ("mmse", "relay"),
                ("cmrc", "relay"), ("ml", "relay")),
        calibration_table=qpsk_table_path,
        seed=1,
        target_errors=1000, min_error_blocks=150, max_blocks=4000,
    )
    return _timed_sweep(cfg)


@pytest.fixture(scope="session")
def no_relay_extension():
    """No-relay baseline continued to 22..34 dB for the crossing and the slope."""
    cfg = SimConfig(
        info_length=1024,
        source_mod="qpsk", relay_mod="qpsk",
        combiner="none", mode="no-relay",
        gamma0_db=(22.0, 26.0, 30.0, 34.0),
        seed=1,
        target_errors=100, min_error_blocks=80, max_blocks=200_000,
    )
    return _timed_sweep(cfg)


@pytest.fixture(scope="session")
def fig_mixed_mods(bpsk_table_path):
    """BPSK source / 16-QAM relay with a 10 dB weaker relay-destination link."""
    cfg = SimConfig(
        info_length=1024,
        source_mod="bpsk", relay_mod="qam16",
        gamma0_db=tuple(float(g) for g in range(4, 22, 2)),
        gamma1_offset_db=-10.0, gamma1p_offset_db=0.0,
        curves=(("none", "no-relay"), ("ml", "relay"), ("ml", "mimo-1x2")),
        calibration_table=bpsk_table_path,
        seed=2,
        target_errors=100, min_error_blocks=60, max_blocks=60_000,
    )
    return _timed_sweep(cfg)
