"""Fading draws, noise scaling, and link bookkeeping."""

import numpy as np
import pytest

from relaysim.channel import (
    LinkRealization,
    awgn_transmit,
    draw_block_fading,
    snr_db_to_noise_var,
)


def test_snr_to_noise_examples():
    assert snr_db_to_noise_var(0.0) == pytest.approx(1.0)
    assert snr_db_to_noise_var(10.0) == pytest.approx(0.1)
    assert snr_db_to_noise_var(3.0, power=2.0) == pytest.approx(2.0 / 10 ** 0.3)


def test_fading_is_unit_power_complex_gaussian():
    rng = np.random.default_rng(2)
    h = draw_block_fading(rng, size=1_000_000)
    assert np.mean(np.abs(h) ** 2) == pytest.approx(1.0, abs=5e-3)
    assert np.abs(np.mean(h)) < 5e-3
    # Circular symmetry: real and imaginary parts carry half the power each.
    assert np.var(h.real) == pytest.approx(0.5, abs=5e-3)
    assert np.var(h.imag) == pytest.approx(0.5, abs=5e-3)


def test_fading_deterministic_under_seed():
    a = draw_block_fading(np.random.default_rng(7), size=16)
    b = draw_block_fading(np.random.default_rng(7), size=16)
    np.testing.assert_array_equal(a, b)


def test_awgn_transmit_noise_statistics():
    rng = np.random.default_rng(3)
    x = np.ones(500_000, dtype=complex)
    y = awgn_transmit(x, 2.0 + 0j, 0.25, 1.0, rng)
    noise = y - 2.0 * x
    assert np.mean(np.abs(noise) ** 2) == pytest.approx(0.25, rel=2e-2)


def test_awgn_transmit_noiseless():
    rng = np.random.default_rng(4)
    x = np.array([1 + 1j, -2 + 0j])
    np.testing.assert_array_equal(awgn_transmit(x, 0.5 + 0.5j, 0.0, 4.0, rng), (1.0 + 1.0j) * x)


def test_awgn_transmit_rejects_negative_variance():
    with pytest.raises(ValueError):
        awgn_transmit(np.ones(2, dtype=complex), 1.0, -0.1, 1.0, np.random.default_rng(0))


def test_link_realization_instantaneous_snrs():
    link = LinkRealization(
        h0=1 + 0j, h1=2 + 0j, h1p=1 + 1j,
        sigma0_sq=1.0, sigma1_sq=0.5, sigma_sr_sq=0.25,
    )
    assert link.gamma1_inst() == pytest.approx(8.0)
    assert link.gamma1p_inst() == pytest.approx(8.0)


def test_link_realization_scales_with_source_power():
    link = LinkRealization(
        h0=1 + 0j, h1=1 + 0j, h1p=1 + 0j,
        sigma0_sq=1.0, sigma1_sq=1.0, sigma_sr_sq=0.5, p0=4.0,
    )
    assert link.gamma1p_inst() == pytest.approx(8.0)


def test_link_realization_rejects_nonpositive_variance():
    with pytest.raises(ValueError):
        LinkRealization(
            h0=0j, h1=0j, h1p=0j,
            sigma0_sq=0.0, sigma1_sq=1.0, sigma_sr_sq=1.0,
        )
