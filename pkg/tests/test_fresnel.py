"""Transform-pair correctness against per-definition oracles."""

import time

import numpy as np
import pytest

from ocdm_radar.fresnel import (
    dfnt_direct,
    dfnt_fast,
    dirichlet_kernel,
    gamma_vector,
    idfnt_direct,
    idfnt_fast,
    phase_fold_correct,
)


def random_complex(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def test_dfnt_delta_n4():
    y = dfnt_direct(np.array([1.0, 0.0, 0.0, 0.0], dtype=complex))
    expected = np.array([np.exp(-1j * np.pi / 4), 1.0, np.exp(1j * 3 * np.pi / 4), 1.0])
    assert np.max(np.abs(y - expected)) < 1e-12


def test_dfnt_zero_input():
    assert np.all(dfnt_direct(np.zeros(4, dtype=complex)) == 0)


def test_idfnt_delta_constant_envelope():
    n = 16
    x = idfnt_direct(np.eye(n, 1, dtype=complex).ravel())
    k = np.arange(n)
    expected = np.exp(1j * np.pi / 4) * np.exp(-1j * np.pi * k * k / n) / n
    assert np.max(np.abs(x - expected)) < 1e-12
    assert np.max(np.abs(np.abs(x) - 1.0 / n)) < 1e-12


@pytest.mark.parametrize("n", [4, 8, 64, 256])
def test_fast_matches_direct(n):
    rng = np.random.default_rng(n)
    x = random_complex(rng, n)
    assert np.max(np.abs(dfnt_fast(x) - dfnt_direct(x))) < 1e-9
    assert np.max(np.abs(idfnt_fast(x) - idfnt_direct(x))) < 1e-9


def test_idfnt_fast_matches_direct_n16():
    rng = np.random.default_rng(16)
    x = random_complex(rng, 16)
    assert np.max(np.abs(idfnt_fast(x) - idfnt_direct(x))) < 1e-10


@pytest.mark.parametrize("n", [2, 4, 6, 8, 64, 250, 256, 1000, 2048, 4096])
def test_round_trip(n):
    rng = np.random.default_rng(n)
    x = random_complex(rng, n)
    assert np.max(np.abs(dfnt_fast(idfnt_fast(x)) - x)) < 1e-9
    assert np.max(np.abs(idfnt_fast(dfnt_fast(x)) - x)) < 1e-9


def test_direct_round_trip_small():
    rng = np.random.default_rng(7)
    x = random_complex(rng, 8)
    assert np.max(np.abs(dfnt_direct(idfnt_direct(x)) - x)) < 1e-10


def test_matrix_input_transforms_columns():
    rng = np.random.default_rng(3)
    frame = random_complex(rng, (32, 5))
    got = dfnt_fast(frame)
    for m in range(5):
        assert np.max(np.abs(got[:, m] - dfnt_fast(frame[:, m]))) < 1e-12


@pytest.mark.parametrize("n", [0, 3, 7, -2])
def test_odd_or_invalid_length_rejected(n):
    with pytest.raises(ValueError):
        dfnt_direct(np.zeros(max(n, 1), dtype=complex) if n > 0 else np.zeros(0))
    if n > 0:
        with pytest.raises(ValueError):
            dfnt_fast(np.zeros(n, dtype=complex))
        with pytest.raises(ValueError):
            idfnt_fast(np.zeros(n, dtype=complex))


def test_gamma_vector_properties():
    g = gamma_vector(8)
    assert g[0] == 1.0
    assert np.max(np.abs(np.abs(g) - 1.0)) < 1e-15


def test_energy_scaling():
    rng = np.random.default_rng(11)
    x = random_complex(rng, 128)
    ratio = np.sum(np.abs(dfnt_fast(x)) ** 2) / np.sum(np.abs(x) ** 2)
    assert abs(ratio - 128) < 1e-9


def test_fast_speedup_over_direct():
    n = 2048
    rng = np.random.default_rng(n)
    x = random_complex(rng, n)
    dfnt_fast(x)  # warm-up

    t0 = time.perf_counter()
    dfnt_direct(x)
    direct_time = time.perf_counter() - t0

    t0 = time.perf_counter()
    for _ in range(10):
        dfnt_fast(x)
    fast_time = (time.perf_counter() - t0) / 10

    assert direct_time / fast_time > 100


def test_phase_fold_rows():
    frame = np.ones((4, 3), dtype=complex)
    out = phase_fold_correct(frame)
    assert np.all(out[0] == 1) and np.all(out[2] == 1)
    assert np.all(out[1] == -1) and np.all(out[3] == -1)


def test_phase_fold_involution():
    rng = np.random.default_rng(5)
    frame = random_complex(rng, (16, 4))
    assert np.array_equal(phase_fold_correct(phase_fold_correct(frame)), frame)


def test_dirichlet_limit_and_zero():
    assert dirichlet_kernel(0.0, 8) == 8
    assert abs(dirichlet_kernel(4.0, 8)) < 1e-12
    assert abs(dirichlet_kernel(8.0, 8) - 8) < 1e-12
    assert abs(dirichlet_kernel(-16.0, 8) - 8) < 1e-12


def test_dirichlet_matches_explicit_sum():
    n = 8
    for a in (0.5, -3.3, 1.0, 7.9, 0.1):
        explicit = sum(np.exp(2j * np.pi * a * l / n) for l in range(n))
        assert abs(dirichlet_kernel(a, n) - explicit) < 1e-12


def test_dirichlet_near_singularity_stable():
    val = dirichlet_kernel(1e-12, 64)
    assert abs(val - 64) < 1e-6
    val = dirichlet_kernel(64 - 1e-12, 64)
    assert abs(val - 64) < 1e-6


def test_dirichlet_invalid_length():
    with pytest.raises(ValueError):
        dirichlet_kernel(1.0, 0)


def test_convolution_theorem():
    n = 64
    rng = np.random.default_rng(19)
    for taps in (2, 5, n):
        x_fres = random_complex(rng, n)
        h = np.zeros(n, dtype=complex)
        h[:taps] = random_complex(rng, taps)
        time_domain = np.fft.ifft(np.fft.fft(idfnt_fast(x_fres)) * np.fft.fft(h))
        got = dfnt_fast(time_domain)
        want = np.fft.ifft(np.fft.fft(x_fres) * np.fft.fft(h))
        assert np.max(np.abs(got - want)) < 1e-9


def test_frequency_shift_theorem_integer():
    n = 64
    rng = np.random.default_rng(23)
    x_fres = random_complex(rng, n)
    time_domain = idfnt_fast(x_fres)
    idx = np.arange(n)
    for k_delta in (-32, -7, 0, 1, 13, 31):
        got = dfnt_fast(time_domain * np.exp(2j * np.pi * k_delta * idx / n))
        want = np.roll(x_fres, k_delta) * np.exp(
            1j * np.pi / n * (2 * idx * k_delta - k_delta**2)
        )
        assert np.max(np.abs(got - want)) < 1e-9
