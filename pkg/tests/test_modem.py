"""Constellation mappings, likelihoods, and soft demapping."""

import math

import numpy as np
import pytest

from relaysim.modem import (
    demap_llrs,
    llrs_from_point_logliks,
    log_symbol_likelihood,
    make_constellation,
    map_bits,
)


@pytest.mark.parametrize("name,size,bits", [("bpsk", 2, 1), ("qpsk", 4, 2), ("qam16", 16, 4)])
def test_constellation_sizes(name, size, bits):
    c = make_constellation(name)
    assert len(c.points) == size
    assert c.bits_per_symbol == bits


def test_4qam_alias():
    a = make_constellation("4qam")
    b = make_constellation("qpsk")
    np.testing.assert_array_equal(a.points, b.points)


def test_unknown_name_rejected():
    with pytest.raises(ValueError):
        make_constellation("8psk")


def test_unit_average_energy():
    for name in ("bpsk", "qpsk", "qam16"):
        c = make_constellation(name)
        assert np.mean(np.abs(c.points) ** 2) == pytest.approx(1.0, abs=1e-12)


def test_bpsk_labels():
    c = make_constellation("bpsk")
    assert c.points[0] == pytest.approx(1.0)
    assert c.points[1] == pytest.approx(-1.0)


def test_qpsk_label_00():
    c = make_constellation("qpsk")
    assert c.points[0] == pytest.approx((1 + 1j) / math.sqrt(2))


def test_qam16_energy_levels():
    c = make_constellation("qam16")
    energies = np.abs(c.points) ** 2
    levels = sorted(set(np.round(energies, 9)))
    assert levels == pytest.approx([0.2, 1.0, 1.8])
    assert energies.mean() == pytest.approx(1.0)


def test_gray_labels_neighbors_differ_in_one_bit():
    # Nearest geometric neighbors of every point differ in exactly one label bit.
    for name in ("qpsk", "qam16"):
        c = make_constellation(name)
        pts = c.points
        for i in range(len(pts)):
            d = np.abs(pts - pts[i])
            d[i] = np.inf
            dmin = d.min()
            for j in np.flatnonzero(np.isclose(d, dmin)):
                assert bin(i ^ int(j)).count("1") == 1


def test_map_bits_grouping():
    c = make_constellation("qpsk")
    syms = map_bits(np.array([0, 0, 1, 1], dtype=np.uint8), c)
    np.testing.assert_allclose(syms, [c.points[0b00], c.points[0b11]])


def test_map_bits_batched_msb_first():
    c = make_constellation("qam16")
    bits = np.array([[1, 0, 1, 1, 0, 0, 0, 0]], dtype=np.uint8)
    syms = map_bits(bits, c)
    np.testing.assert_allclose(syms[0], [c.points[0b1011], c.points[0b0000]])


def test_map_bits_rejects_ragged_length():
    c = make_constellation("qpsk")
    with pytest.raises(ValueError):
        map_bits(np.array([0, 1, 0], dtype=np.uint8), c)


def test_log_symbol_likelihood_values():
    # y = hx: peak value -ln(pi s2); unit squared distance adds -1/s2.
    assert log_symbol_likelihood(1 + 0j, 1.0, 1.0, 1 + 0j) == pytest.approx(-math.log(math.pi))
    assert log_symbol_likelihood(1 + 1j, 1.0, 1.0, 1 + 0j) == pytest.approx(-math.log(math.pi) - 1.0)
    assert log_symbol_likelihood(1 + 1j, 1.0, 2.0, 1 + 0j) == pytest.approx(
        -math.log(2 * math.pi) - 0.5
    )


def test_log_symbol_likelihood_rejects_nonpositive_variance():
    with pytest.raises(ValueError):
        log_symbol_likelihood(0j, 1.0, 0.0, 1 + 0j)


def test_density_normalizes_to_one():
    # Numerically integrate exp(loglik) over the complex plane.
    grid = np.linspace(-6.0, 6.0, 601)
    dx = grid[1] - grid[0]
    re, im = np.meshgrid(grid, grid)
    y = re + 1j * im
    total = np.exp(log_symbol_likelihood(y, 0.9 - 0.4j, 0.7, (1 + 1j) / math.sqrt(2))).sum()
    assert total * dx * dx == pytest.approx(1.0, abs=1e-3)


def test_bpsk_llr_closed_form():
    # Two-point subsets collapse the LLR to -4 Re(conj(g) y) / s2 for labels
    # 0 -> +1, 1 -> -1.
    rng = np.random.default_rng(3)
    c = make_constellation("bpsk")
    y = rng.standard_normal(32) + 1j * rng.standard_normal(32)
    g = 0.8 - 0.3j
    s2 = 0.37
    got = demap_llrs(y, g, s2, c)
    want = -4.0 * np.real(np.conj(g) * y) / s2
    np.testing.assert_allclose(got, want, rtol=1e-12)


def test_demap_llr_sign_tracks_transmitted_bits():
    rng = np.random.default_rng(5)
    for name in ("bpsk", "qpsk", "qam16"):
        c = make_constellation(name)
        bits = rng.integers(0, 2, size=12 * c.bits_per_symbol).astype(np.uint8)
        y = map_bits(bits, c)  # noiseless, unit gain
        llrs = demap_llrs(y, 1.0, 0.05, c)
        np.testing.assert_array_equal((llrs > 0).astype(np.uint8), bits)


def test_demap_llrs_batched_rows_match_scalar():
    rng = np.random.default_rng(9)
    c = make_constellation("qpsk")
    y = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
    gains = np.array([1.0 + 0.2j, 0.4 - 1.1j, -0.7 + 0.05j])[:, None]
    s2 = np.array([0.3, 1.7, 0.9])[:, None]
    got = demap_llrs(y, gains, s2, c)
    assert got.shape == (3, 10)
    for i in range(3):
        row = demap_llrs(y[i], complex(gains[i, 0]), float(s2[i, 0]), c)
        np.testing.assert_allclose(got[i], row, rtol=1e-12)


def test_demap_llrs_rejects_nonpositive_variance():
    c = make_constellation("bpsk")
    with pytest.raises(ValueError):
        demap_llrs(np.zeros(2, dtype=complex), 1.0, -1.0, c)
    with pytest.raises(ValueError):
        demap_llrs(np.zeros((2, 2), dtype=complex), 1.0, np.array([[1.0], [0.0]]), c)


def test_llrs_from_point_logliks_handles_wide_dynamic_range():
    # Subset reductions must survive tables whose global max would underflow
    # every other entry; each bit's two subsets are factored independently.
    table = np.array([[0.0, -800.0, -750.0, -760.0]])
    out = llrs_from_point_logliks(table, 2)
    assert np.all(np.isfinite(out))
    # Bit 0 on-subset {10,11} vs off {00,01}: max on-entry dominates.
    assert out[0, 0] == pytest.approx(
        np.logaddexp(-750.0, -760.0) - np.logaddexp(0.0, -800.0), rel=1e-12
    )
