"""Radar/comm channel models against brute-force and closed-form oracles."""

import numpy as np
import pytest

from ocdm_radar.channel import (
    CommChannelConfig,
    RadarChannelConfig,
    Target,
    apply_comm_channel,
    apply_radar_channel,
    apply_shift_channel,
    biased_cir_from_shifts,
    cfr_from_cir,
    ideal_cir_from_shifts,
    ideal_cir_oracle,
    load_cfr_csv,
    normalize_target,
    two_tap_tilt_cir,
)
from ocdm_radar.framing import (
    WaveformParams,
    add_cp,
    build_pilot_frame,
    deserialize,
    remove_cp,
    serialize,
    to_time_frame,
)
from ocdm_radar.fresnel import dfnt_fast, dirichlet_kernel
from ocdm_radar.rxproc import receive_frame


def pilot_stream(params):
    return serialize(add_cp(to_time_frame(build_pilot_frame(params)), params.N_CP))


def test_normalize_target_range():
    params = WaveformParams(N=2048, M=2, B=1e9, fc=79e9)
    n_delta, k_delta = normalize_target(Target(range_m=30.0), params)
    assert abs(n_delta - 200.0) < 1e-9
    assert k_delta == 0.0


def test_normalize_target_doppler_sign_and_magnitude():
    params = WaveformParams(N=2048, M=2, B=1e9, fc=79e9)
    _, k_delta = normalize_target(Target(range_m=0.0, velocity_mps=92.71), params)
    assert abs(abs(k_delta) - 0.1) < 1e-3
    assert k_delta < 0  # default convention: positive velocity -> negative shift
    _, k_pos = normalize_target(
        Target(range_m=0.0, velocity_mps=92.71), params, doppler_sign=+1.0
    )
    assert k_pos > 0


def test_integer_delay_equals_circular_shift():
    params = WaveformParams(N=32, M=3)
    rng = np.random.default_rng(0)
    frame = rng.standard_normal((32, 3)) + 1j * rng.standard_normal((32, 3))
    stream = serialize(frame)
    for n_delta in (0, 1, 5, 17, 31):
        out = apply_shift_channel(stream, params, [(float(n_delta), 0.0, 1.0)])
        want = serialize(np.roll(frame, n_delta, axis=0))
        assert np.max(np.abs(out - want)) < 1e-10


def test_fractional_delay_matches_dirichlet_convolution():
    # Time-domain kernel identity: g_nu = (1/N) e^{-i pi (nu - nd)} D(nu - nd).
    params = WaveformParams(N=32, M=1)
    rng = np.random.default_rng(1)
    x = rng.standard_normal(32) + 1j * rng.standard_normal(32)
    for n_delta in (0.5, 2.7, 13.25):
        nu = np.arange(32)
        kernel = (
            np.exp(-1j * np.pi * (nu - n_delta))
            * dirichlet_kernel(nu - n_delta, 32)
            / 32
        )
        want = np.fft.ifft(np.fft.fft(x) * np.fft.fft(kernel))
        got = apply_shift_channel(x, params, [(n_delta, 0.0, 1.0)])
        assert np.max(np.abs(got - want)) < 1e-11


def test_zero_targets_zero_output():
    params = WaveformParams(N=16, M=2)
    out = apply_radar_channel(pilot_stream(params), RadarChannelConfig(targets=[]), params)
    assert np.all(out == 0)


def test_range_ambiguity_rejected():
    params = WaveformParams(N=16, M=2, B=1e9, fc=79e9)
    # n_delta = 2 R B / c0 = 16 exactly at R = 2.4 m
    cfg = RadarChannelConfig(targets=[Target(range_m=2.4)])
    with pytest.raises(ValueError):
        apply_radar_channel(pilot_stream(params), cfg, params)


def test_brute_force_received_frame_oracle():
    # Term-by-term evaluation of the delayed+Doppler-shifted frame.
    params = WaveformParams(N=256, M=4)
    n_delta, k_delta = 50.0, 0.25
    stream = pilot_stream(params)
    got = apply_shift_channel(stream, params, [(n_delta, k_delta, 1.0)])

    x = to_time_frame(build_pilot_frame(params))
    n_idx = np.arange(params.N)
    kernel = (
        np.exp(-1j * np.pi * (n_idx - n_delta))
        * dirichlet_kernel(n_idx - n_delta, params.N)
        / params.N
    )
    want = np.empty_like(x)
    for m in range(params.M):
        delayed = np.array(
            [np.sum(x[(n - n_idx) % params.N, m] * kernel) for n in n_idx]
        )
        phi = 2 * np.pi * k_delta * (m * params.N + n_idx) / params.N
        want[:, m] = delayed * np.exp(1j * phi)
    got_frame = remove_cp(deserialize(got, params), 0)
    assert np.max(np.abs(got_frame - want)) < 1e-9


def test_multi_target_linearity():
    params = WaveformParams(N=64, M=4)
    stream = pilot_stream(params)
    shifts = [(10.0, 0.2, 1.0), (33.5, -0.4, 0.5 - 0.5j)]
    combined = apply_shift_channel(stream, params, shifts)
    separate = sum(apply_shift_channel(stream, params, [s]) for s in shifts)
    assert np.max(np.abs(combined - separate)) < 1e-10


def test_noise_determinism_and_snr():
    params = WaveformParams(N=64, M=32)
    stream = pilot_stream(params)
    shifts = [(5.0, 0.0, 1.0)]
    a = apply_shift_channel(stream, params, shifts, snr_db=10.0, rng_seed=123)
    b = apply_shift_channel(stream, params, shifts, snr_db=10.0, rng_seed=123)
    assert np.array_equal(a, b)
    clean = apply_shift_channel(stream, params, shifts)
    noise = a - clean
    measured = 10 * np.log10(np.mean(np.abs(clean) ** 2) / np.mean(np.abs(noise) ** 2))
    assert abs(measured - 10.0) < 0.5


def test_ideal_oracle_integer_delta():
    params = WaveformParams(N=16, M=3)
    cir = ideal_cir_from_shifts([(3.0, 0.0, 1.0)], params)
    want = np.zeros((16, 3), dtype=complex)
    want[3, :] = 1.0
    assert np.max(np.abs(cir - want)) < 1e-12


def test_ideal_oracle_zero_targets():
    params = WaveformParams(N=16, M=3)
    assert np.all(ideal_cir_oracle(RadarChannelConfig(targets=[]), params) == 0)


def test_ideal_oracle_linearity():
    params = WaveformParams(N=32, M=2)
    shifts = [(4.5, 0.3, 1.0), (9.25, -0.1, 0.3 + 0.1j)]
    combined = ideal_cir_from_shifts(shifts, params)
    separate = sum(ideal_cir_from_shifts([s], params) for s in shifts)
    assert np.max(np.abs(combined - separate)) < 1e-12


def test_biased_oracle_specializations():
    params = WaveformParams(N=64, M=2)
    # k_delta = 0, integer n_delta: ideal column up to the global phase e^{i pi n_delta}
    for n_delta in (6.0, 7.0):
        biased = biased_cir_from_shifts([(n_delta, 0.0, 1.0)], params)
        ideal = ideal_cir_from_shifts([(n_delta, 0.0, 1.0)], params)
        assert np.max(np.abs(biased - ideal * np.exp(1j * np.pi * n_delta))) < 1e-10
    # integer k_delta = 1 displaces the peak by one range bin
    biased = biased_cir_from_shifts([(50.0, 1.0, 1.0)], params)
    assert np.argmax(np.abs(biased[:, 0])) == 51


def test_biased_oracle_matches_pipeline_fractional():
    params = WaveformParams(N=64, M=4)
    shifts = [(20.0, 0.3, 1.0)]
    rx = apply_shift_channel(pilot_stream(params), params, shifts)
    got = receive_frame(rx, params)
    want = biased_cir_from_shifts(shifts, params)
    assert np.max(np.abs(got - want)) < 1e-8


def test_doppler_only_channel_obeys_frequency_shift_theorem():
    # H=1, n_delta=0, integer k_delta: uncorrected receive frame equals the
    # shifted/phase-rotated pilot column exactly.
    params = WaveformParams(N=32, M=3)
    k_delta = 5.0
    rx = apply_shift_channel(pilot_stream(params), params, [(0.0, k_delta, 1.0)])
    frame = dfnt_fast(remove_cp(deserialize(rx, params), 0))
    pilot = build_pilot_frame(params)
    k = np.arange(params.N)
    phase = np.exp(1j * np.pi / params.N * (2 * k * k_delta - k_delta**2))
    m = np.arange(params.M)
    phi_m = np.exp(2j * np.pi * k_delta * m * params.N / params.N)
    want = np.roll(pilot, int(k_delta), axis=0) * phase[:, None] * phi_m[None, :]
    assert np.max(np.abs(frame - want)) < 1e-10


def test_comm_channel_identity():
    params = WaveformParams(N=32, M=4, N_CP=4)
    rng = np.random.default_rng(9)
    frame = rng.standard_normal((36, 4)) + 1j * rng.standard_normal((36, 4))
    stream = serialize(frame)
    cfg = CommChannelConfig(cfr=np.ones(32, dtype=complex))
    out = apply_comm_channel(stream, cfg, params)
    # CP is rebuilt from the filtered useful part; with identity filtering the
    # whole stream is reproduced.
    assert np.max(np.abs(out - serialize(add_cp(remove_cp(frame, 4), 4)))) < 1e-12


def test_comm_channel_matches_time_domain_convolution():
    params = WaveformParams(N=64, M=3, N_CP=8)
    rng = np.random.default_rng(10)
    useful = rng.standard_normal((64, 3)) + 1j * rng.standard_normal((64, 3))
    stream = serialize(add_cp(useful, 8))
    cir = np.array([0.9 + 0.1j, -0.4j])
    out = apply_comm_channel(stream, CommChannelConfig(cir=cir), params)
    out_useful = remove_cp(deserialize(out, params), 8)
    for m in range(3):
        want = cir[0] * useful[:, m] + cir[1] * np.roll(useful[:, m], 1)
        assert np.max(np.abs(out_useful[:, m] - want)) < 1e-10


def test_comm_channel_delay_spread_flagged():
    params = WaveformParams(N=32, M=2, N_CP=2)
    cir = np.zeros(8, dtype=complex)
    cir[0] = 1.0
    cir[5] = 0.5
    with pytest.raises(ValueError):
        apply_comm_channel(
            serialize(np.zeros((34, 2), dtype=complex)),
            CommChannelConfig(cir=cir),
            params,
        )


def test_comm_channel_config_exclusive():
    params = WaveformParams(N=16, M=1, N_CP=2)
    stream = np.zeros(18, dtype=complex)
    with pytest.raises(ValueError):
        apply_comm_channel(stream, CommChannelConfig(), params)
    with pytest.raises(ValueError):
        apply_comm_channel(
            stream,
            CommChannelConfig(cir=np.ones(1), cfr=np.ones(16)),
            params,
        )


def test_two_tap_tilt_cir_span():
    cir = two_tap_tilt_cir(10.0)
    cfr = cfr_from_cir(cir, 256)
    span = 20 * np.log10(np.abs(cfr).max() / np.abs(cfr).min())
    assert abs(span - 10.0) < 1e-9


def test_load_cfr_csv(tmp_path):
    n = 8
    cfr = np.exp(2j * np.pi * np.arange(n) / n)
    rows = np.column_stack([np.arange(n), cfr.real, cfr.imag])
    path = tmp_path / "cfr.csv"
    np.savetxt(path, rows, delimiter=",")
    loaded = load_cfr_csv(path, n)
    assert np.max(np.abs(loaded - cfr)) < 1e-12
    with pytest.raises(ValueError):
        load_cfr_csv(path, 16)
