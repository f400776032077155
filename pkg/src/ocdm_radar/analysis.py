"""Radar-quality metrics, Doppler-tolerance sweeps, and PAPR statistics.

Metric definitions (applied identically to every compared waveform so the
relative comparisons stay valid):

* range cut: the image column magnitude at the Doppler bin of the global peak
* mainlobe: peak bin plus/minus mainlobe_halfwidth bins (circular), default 1
* PPLR: peak power over the zero-Doppler reference peak power
* PSLR: strongest sidelobe power over the mainlobe peak power
* ISLR: integrated sidelobe power over integrated mainlobe power
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import apply_shift_channel
from .comms import ofdm_grid, ofdm_modulate, ofdm_pilot_mask
from .framing import (
    RadComFrameSpec,
    WaveformParams,
    add_cp,
    build_pilot_frame,
    build_radcom_frame,
    qpsk_map,
    serialize,
    to_time_frame,
)
from .rxproc import RangeVelocityImage, doppler_process, receive_frame

__all__ = [
    "RangeCutMetrics",
    "PaprCcdf",
    "SweepResult",
    "range_cut_metrics",
    "single_point_image",
    "doppler_tolerance_sweep",
    "oversampled_papr_db",
    "papr_ccdf",
    "pilot_symbol_builder",
    "radcom_symbol_builder",
    "ofdm_symbol_builder",
]


@dataclass(frozen=True)
class RangeCutMetrics:
    pplr_db: float
    pslr_db: float
    islr_db: float
    mainlobe_bins: tuple[int, ...]


@dataclass(frozen=True)
class PaprCcdf:
    thresholds_db: np.ndarray
    exceedance: np.ndarray
    oversample: int
    papr_samples_db: np.ndarray

    @property
    def mean_papr_db(self) -> float:
        return float(np.mean(self.papr_samples_db))

    def papr_at_probability(self, probability: float) -> float:
        """PAPR level whose exceedance probability equals the given value."""
        return float(np.quantile(self.papr_samples_db, 1.0 - probability))


@dataclass(frozen=True)
class SweepResult:
    n_grid: np.ndarray
    k_grid: np.ndarray
    pplr_db: np.ndarray
    pslr_db: np.ndarray
    islr_db: np.ndarray


def range_cut_metrics(
    image: RangeVelocityImage, reference_peak_power: float, mainlobe_halfwidth: int = 1
) -> RangeCutMetrics:
    """Mainlobe/sidelobe metrics of the range cut through the global peak."""
    if reference_peak_power <= 0:
        raise ValueError("reference peak power must be positive")
    mag = image.magnitude
    if mag.size == 0:
        raise ValueError("empty image")
    peak_row, peak_col = np.unravel_index(int(np.argmax(mag)), mag.shape)
    cut_power = mag[:, peak_col] ** 2
    n_bins = cut_power.size
    lobe = [(peak_row + d) % n_bins for d in range(-mainlobe_halfwidth, mainlobe_halfwidth + 1)]
    lobe_set = sorted(set(lobe))
    side_mask = np.ones(n_bins, dtype=bool)
    side_mask[lobe_set] = False
    peak_power = float(cut_power[peak_row])
    side_power = cut_power[side_mask]
    pplr = 10.0 * np.log10(peak_power / reference_peak_power)
    with np.errstate(divide="ignore"):
        pslr = (
            10.0 * np.log10(float(side_power.max()) / peak_power)
            if side_power.size
            else -np.inf
        )
        islr = (
            10.0 * np.log10(float(side_power.sum()) / float(cut_power[lobe_set].sum()))
            if side_power.size
            else -np.inf
        )
    return RangeCutMetrics(float(pplr), float(pslr), float(islr), tuple(lobe_set))


def single_point_image(
    params: WaveformParams, n_delta: float, k_delta: float
) -> RangeVelocityImage:
    """Noise-free single-scatterer pilot-frame pipeline run."""
    tx = serialize(add_cp(to_time_frame(build_pilot_frame(params)), params.N_CP))
    rx = apply_shift_channel(tx, params, [(n_delta, k_delta, 1.0)])
    return doppler_process(receive_frame(rx, params), params)


def _sweep_cell(args) -> tuple[float, float, float]:
    params, n_delta, k_delta, reference, halfwidth = args
    metrics = range_cut_metrics(
        single_point_image(params, n_delta, k_delta), reference, halfwidth
    )
    return metrics.pplr_db, metrics.pslr_db, metrics.islr_db


def doppler_tolerance_sweep(
    params: WaveformParams,
    n_grid,
    k_grid,
    mainlobe_halfwidth: int = 1,
    parallelism: int = 1,
) -> SweepResult:
    """Metric surfaces over the (n_delta, k_delta) grid, noise-free.

    The PPLR reference for each n_delta is that target's own zero-Doppler
    peak power, so the k_delta = 0 column of the PPLR surface is exactly
    0 dB.  Grid cells are independent; with parallelism > 1 they are
    dispatched to worker processes and aggregated in grid order.
    """
    n_grid = np.asarray(n_grid, dtype=float)
    k_grid = np.asarray(k_grid, dtype=float)
    if np.any((n_grid < 0) | (n_grid >= params.N)):
        raise ValueError("n_delta grid must lie within [0, N)")
    if np.any(np.abs(k_grid) > 0.5 + 1e-12):
        raise ValueError("k_delta grid must lie within [-0.5, 0.5]")

    references = []
    for n_delta in n_grid:
        image = single_point_image(params, float(n_delta), 0.0)
        references.append(float(image.magnitude.max() ** 2))

    jobs = [
        (params, float(n_delta), float(k_delta), references[i], mainlobe_halfwidth)
        for i, n_delta in enumerate(n_grid)
        for k_delta in k_grid
    ]
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            rows = list(pool.map(_sweep_cell, jobs))
    else:
        rows = [_sweep_cell(job) for job in jobs]

    shape = (n_grid.size, k_grid.size)
    values = np.asarray(rows, dtype=float).reshape(shape + (3,))
    return SweepResult(
        n_grid, k_grid, values[:, :, 0], values[:, :, 1], values[:, :, 2]
    )


def oversampled_papr_db(time_symbol: np.ndarray, oversample: int = 20) -> float:
    """PAPR of one symbol after zero-padded spectral interpolation.

    The spectrum is split at N/2 so both signal halves keep their band
    position, matching a DAC-style reconstruction at oversample x rate.
    """
    x = np.asarray(time_symbol, dtype=np.complex128).ravel()
    n = x.size
    if oversample < 1:
        raise ValueError("oversampling factor must be >= 1")
    spectrum = np.fft.fft(x)
    padded = np.zeros(n * oversample, dtype=np.complex128)
    padded[: n // 2] = spectrum[: n // 2]
    padded[n * oversample - n // 2 :] = spectrum[n // 2 :]
    upsampled = np.fft.ifft(padded) * oversample
    power = np.abs(upsampled) ** 2
    return float(10.0 * np.log10(power.max() / power.mean()))


def papr_ccdf(
    symbol_builder,
    trials: int,
    oversample: int = 20,
    thresholds_db: np.ndarray | None = None,
    rng_seed: int = 0,
) -> PaprCcdf:
    """Empirical PAPR CCDF over random payload realizations.

    ``symbol_builder(rng)`` must return one discrete-time symbol (no CP).
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = np.random.default_rng(rng_seed)
    samples = np.array(
        [oversampled_papr_db(symbol_builder(rng), oversample) for _ in range(trials)]
    )
    if thresholds_db is None:
        thresholds_db = np.arange(0.0, 18.0 + 1e-9, 0.1)
    thresholds_db = np.asarray(thresholds_db, dtype=float)
    exceedance = np.array([(samples > t).mean() for t in thresholds_db])
    return PaprCcdf(thresholds_db, exceedance, oversample, samples)


def pilot_symbol_builder(params: WaveformParams):
    """Single active subchirp: a constant-envelope chirp in time."""
    pilot = np.zeros((params.N, 1), dtype=np.complex128)
    pilot[0, 0] = 1.0
    symbol = to_time_frame(pilot)[:, 0]

    def build(rng):
        return symbol

    return build


def radcom_symbol_builder(params: WaveformParams, spec: RadComFrameSpec):
    """Sector-modulated symbol with a fresh random QPSK payload per trial."""
    n_data = spec.num_data_subchirps(params.N)
    scale = np.sqrt(spec.symbol_energy)

    def build(rng):
        bits = rng.integers(0, 2, size=2 * n_data)
        symbols = (scale * qpsk_map(bits)).reshape(n_data, 1)
        frame = build_radcom_frame(
            WaveformParams(params.N, 1, params.N_CP, params.B, params.fc), spec, symbols
        )
        return to_time_frame(frame)[:, 0]

    return build


def ofdm_symbol_builder(params: WaveformParams, pilot_spacing: int = 8):
    """Comb-pilot OFDM symbol with a fresh random QPSK payload per trial."""
    single = WaveformParams(params.N, 1, 0, params.B, params.fc)
    n_data = params.N - int(ofdm_pilot_mask(params.N, pilot_spacing).sum())

    def build(rng):
        bits = rng.integers(0, 2, size=2 * n_data)
        grid = ofdm_grid(qpsk_map(bits).reshape(n_data, 1), single, pilot_spacing)
        return ofdm_modulate(grid, single)

    return build
