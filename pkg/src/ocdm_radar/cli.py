"""Command-line front end: scenario configs in, CSV/JSON artifacts out.

Subcommands: selftest, params, radar, mimo, radcom, sweep, papr.  Every run
writes its artifacts plus a manifest (file list, resolved config, config
hash, seed) into the output directory, so a run can be reproduced from the
manifest alone.

Exit codes: 0 ok, 1 runtime failure, 2 config/schema violation,
3 precondition violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    doppler_tolerance_sweep,
    ofdm_symbol_builder,
    papr_ccdf,
    pilot_symbol_builder,
    radcom_symbol_builder,
)
from .channel import (
    CommChannelConfig,
    RadarChannelConfig,
    Target,
    apply_comm_channel,
    apply_radar_channel,
    load_cfr_csv,
    two_tap_tilt_cir,
)
from .comms import (
    data_rate_comb_pilot,
    data_rate_radcom,
    equalize_and_extract,
    estimate_comm_cfr,
    evm_and_snr,
)
from .framing import (
    MimoConfig,
    RadComFrameSpec,
    WaveformParams,
    add_cp,
    build_mimo_pilot_frame,
    build_pilot_frame,
    build_radcom_frame,
    qpsk_demap,
    qpsk_map,
    serialize,
    to_time_frame,
)
from .rxproc import (
    compute_radar_params,
    doppler_process,
    estimate_peak,
    image_to_csv,
    mimo_demux,
    radcom_extract_cir,
    receive_frame,
)
from .selftest import run_selftest

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_SCHEMA = 2
EXIT_PRECONDITION = 3

OUTPUT_DIR_ENV = "OCDM_RADAR_OUTDIR"

# Peak must clear the noise floor by this margin to count as a detection.
DETECTION_MARGIN_DB = 13.0

DESK_WAVEFORM = {"N": 256, "M": 32, "N_CP": 0, "B": 1e9, "fc": 79e9}
FULL_WAVEFORM = {"N": 2048, "M": 5120, "N_CP": 0, "B": 1e9, "fc": 79e9}


class ConfigError(Exception):
    """Schema-level config problem; message names the offending field."""


def _require_keys(obj: dict, allowed: dict, path: str) -> None:
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected an object")
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown key")
    for key, required in allowed.items():
        if required and key not in obj:
            raise ConfigError(f"{path}.{key}: missing required key")


def _number(obj, path, lo=None, hi=None, integer=False):
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ConfigError(f"{path}: expected a number")
    if integer and int(obj) != obj:
        raise ConfigError(f"{path}: expected an integer")
    if lo is not None and obj < lo:
        raise ConfigError(f"{path}: must be >= {lo}")
    if hi is not None and obj > hi:
        raise ConfigError(f"{path}: must be <= {hi}")
    return int(obj) if integer else float(obj)


def _complex_amplitude(obj, path) -> complex:
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return complex(obj)
    if isinstance(obj, list) and len(obj) == 2:
        return complex(_number(obj[0], f"{path}[0]"), _number(obj[1], f"{path}[1]"))
    raise ConfigError(f"{path}: expected a number or [re, im] pair")


_SCHEMA = {
    "waveform": False,
    "mode": False,
    "targets": False,
    "snr_db": False,
    "seed": False,
    "mimo": False,
    "radcom": False,
    "comm": False,
    "sweep": False,
    "papr": False,
    "output_dir": False,
}


def resolve_config(raw: dict, full_scale: bool = False) -> dict:
    """Validate the raw JSON object and fill in every default."""
    _require_keys(raw, _SCHEMA, "config")

    waveform = dict(FULL_WAVEFORM if full_scale else DESK_WAVEFORM)
    if "waveform" in raw:
        _require_keys(raw["waveform"], {k: False for k in waveform}, "config.waveform")
        waveform.update(raw["waveform"])
    waveform["N"] = _number(waveform["N"], "config.waveform.N", lo=2, integer=True)
    waveform["M"] = _number(waveform["M"], "config.waveform.M", lo=1, integer=True)
    waveform["N_CP"] = _number(waveform["N_CP"], "config.waveform.N_CP", lo=0, integer=True)
    waveform["B"] = _number(waveform["B"], "config.waveform.B", lo=1.0)
    waveform["fc"] = _number(waveform["fc"], "config.waveform.fc", lo=1.0)

    mode = raw.get("mode", "radar")
    if mode not in ("radar", "mimo", "radcom", "ofdm-baseline"):
        raise ConfigError(f"config.mode: unknown mode {mode!r}")

    targets = []
    for i, t in enumerate(raw.get("targets", [])):
        _require_keys(
            t,
            {"range_m": True, "velocity_mps": False, "amplitude": False},
            f"config.targets[{i}]",
        )
        targets.append(
            {
                "range_m": _number(t["range_m"], f"config.targets[{i}].range_m", lo=0.0),
                "velocity_mps": _number(
                    t.get("velocity_mps", 0.0), f"config.targets[{i}].velocity_mps"
                ),
                "amplitude": _complex_amplitude(
                    t.get("amplitude", 1.0), f"config.targets[{i}].amplitude"
                ),
            }
        )

    snr_db = raw.get("snr_db")
    if snr_db is not None:
        snr_db = _number(snr_db, "config.snr_db")
    seed = _number(raw.get("seed", 0), "config.seed", integer=True)

    mimo = {"num_tx": 4, "num_rx": 1, "tx": 0, "rx": 0}
    if "mimo" in raw:
        _require_keys(raw["mimo"], {k: False for k in mimo}, "config.mimo")
        mimo.update(raw["mimo"])
    for key in mimo:
        mimo[key] = _number(mimo[key], f"config.mimo.{key}", lo=0, integer=True)

    radcom = {"N_CP": None, "pilot_energy": 1.0, "symbol_energy": 1.0, "avg_symbols": None}
    if "radcom" in raw:
        _require_keys(raw["radcom"], {k: False for k in radcom}, "config.radcom")
        radcom.update(raw["radcom"])
    if radcom["N_CP"] is None:
        radcom["N_CP"] = max(waveform["N_CP"], waveform["N"] // 4)
    radcom["N_CP"] = _number(radcom["N_CP"], "config.radcom.N_CP", lo=1, integer=True)
    radcom["pilot_energy"] = _number(radcom["pilot_energy"], "config.radcom.pilot_energy", lo=0.0)
    radcom["symbol_energy"] = _number(
        radcom["symbol_energy"], "config.radcom.symbol_energy", lo=0.0
    )
    if radcom["avg_symbols"] is not None:
        radcom["avg_symbols"] = _number(
            radcom["avg_symbols"], "config.radcom.avg_symbols", lo=1, integer=True
        )

    comm = {"cfr_csv": None, "tilt_db": 10.0, "snr_db": 30.0}
    if "comm" in raw:
        _require_keys(raw["comm"], {k: False for k in comm}, "config.comm")
        comm.update(raw["comm"])
    comm["tilt_db"] = _number(comm["tilt_db"], "config.comm.tilt_db", lo=0.0)
    comm["snr_db"] = _number(comm["snr_db"], "config.comm.snr_db")
    if comm["cfr_csv"] is not None and not isinstance(comm["cfr_csv"], str):
        raise ConfigError("config.comm.cfr_csv: expected a path string")

    sweep = {"n_grid": [0, 32, 64, 96, 128, 160, 192, 224], "k_grid": [-0.5, -0.25, -0.1, 0.0, 0.1, 0.25, 0.5]}
    if "sweep" in raw:
        _require_keys(raw["sweep"], {k: False for k in sweep}, "config.sweep")
        sweep.update(raw["sweep"])
    for name in ("n_grid", "k_grid"):
        if not isinstance(sweep[name], list) or not sweep[name]:
            raise ConfigError(f"config.sweep.{name}: expected a non-empty list")
        sweep[name] = [_number(v, f"config.sweep.{name}[{i}]") for i, v in enumerate(sweep[name])]

    papr = {"trials": 1000, "oversample": 20, "waveforms": ["pilot", "radcom", "ofdm"]}
    if "papr" in raw:
        _require_keys(raw["papr"], {k: False for k in papr}, "config.papr")
        papr.update(raw["papr"])
    papr["trials"] = _number(papr["trials"], "config.papr.trials", lo=1, integer=True)
    papr["oversample"] = _number(papr["oversample"], "config.papr.oversample", lo=1, integer=True)
    for w in papr["waveforms"]:
        if w not in ("pilot", "radcom", "ofdm"):
            raise ConfigError(f"config.papr.waveforms: unknown waveform {w!r}")

    output_dir = raw.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        raise ConfigError("config.output_dir: expected a path string")

    return {
        "waveform": waveform,
        "mode": mode,
        "targets": targets,
        "snr_db": snr_db,
        "seed": seed,
        "mimo": mimo,
        "radcom": radcom,
        "comm": comm,
        "sweep": sweep,
        "papr": papr,
        "output_dir": output_dir,
    }


def _params_from(config: dict) -> WaveformParams:
    w = config["waveform"]
    return WaveformParams(N=w["N"], M=w["M"], N_CP=w["N_CP"], B=w["B"], fc=w["fc"])


def _targets_from(config: dict) -> list[Target]:
    return [
        Target(t["range_m"], t["velocity_mps"], t["amplitude"]) for t in config["targets"]
    ]


def _canonical_json(obj) -> str:
    def default(o):
        if isinstance(o, complex):
            return [o.real, o.imag]
        raise TypeError(f"not JSON serializable: {type(o)}")

    return json.dumps(obj, sort_keys=True, indent=2, default=default)


def _write_manifest(out_dir: Path, command: str, config: dict, files: list[str]) -> None:
    resolved = _canonical_json(config)
    manifest = {
        "command": command,
        "config": json.loads(resolved),
        "config_sha256": hashlib.sha256(resolved.encode()).hexdigest(),
        "seed": config["seed"],
        "files": sorted(files),
        "version": __version__,
    }
    (out_dir / "manifest.json").write_text(_canonical_json(manifest) + "\n")


def _emit_json(out_dir: Path, name: str, payload: dict, files: list[str]) -> None:
    (out_dir / name).write_text(_canonical_json(payload) + "\n")
    files.append(name)


def _emit_image(out_dir: Path, prefix: str, image, files: list[str]) -> None:
    written = image_to_csv(image, out_dir / prefix)
    files.extend(Path(p).name for p in written)


def _peak_payload(image, params) -> dict:
    peak = estimate_peak(image)
    power = image.magnitude**2
    pr, pc = np.unravel_index(int(np.argmax(power)), power.shape)
    mask = np.ones_like(power, dtype=bool)
    mask[pr, pc] = False
    floor = float(power[mask].mean()) if mask.any() else 0.0
    margin = 10.0 * np.log10(power[pr, pc] / floor) if floor > 0 else np.inf
    return {
        "range_m": peak.range_m,
        "velocity_mps": peak.velocity_mps,
        "power_db": peak.power_db,
        "noise_margin_db": None if np.isinf(margin) else float(margin),
        "detected": bool(margin >= DETECTION_MARGIN_DB),
    }


def _cmd_params(config: dict, out_dir: Path) -> list[str]:
    params = _params_from(config)
    num_tx = config["mimo"]["num_tx"] if config["mode"] == "mimo" else None
    if config["mode"] == "radcom":
        params = WaveformParams(
            params.N, params.M, config["radcom"]["N_CP"], params.B, params.fc
        )
    rp = compute_radar_params(params, num_tx=num_tx)
    payload = {
        "processing_gain_db": round(rp.processing_gain_db, 2),
        "range_resolution_m": round(rp.range_resolution_m, 2),
        "max_unambiguous_range_m": round(rp.max_unambiguous_range_m, 2),
        "velocity_resolution_mps": round(rp.velocity_resolution_mps, 2),
        "max_unambiguous_velocity_mps": round(rp.max_unambiguous_velocity_mps, 2),
        "max_cp_range_m": None if rp.max_cp_range_m is None else round(rp.max_cp_range_m, 2),
        "mimo_max_unambiguous_range_m": (
            None
            if rp.mimo_max_unambiguous_range_m is None
            else round(rp.mimo_max_unambiguous_range_m, 2)
        ),
        "data_rate_radcom_bps": data_rate_radcom(params, config["radcom"]["N_CP"]),
        "data_rate_comb_pilot_bps": data_rate_comb_pilot(params, config["radcom"]["N_CP"]),
    }
    files: list[str] = []
    _emit_json(out_dir, "radar_params.json", payload, files)
    return files


def _cmd_radar(config: dict, out_dir: Path) -> list[str]:
    params = _params_from(config)
    cfg = RadarChannelConfig(
        targets=_targets_from(config), snr_db=config["snr_db"], rng_seed=config["seed"]
    )
    tx = serialize(add_cp(to_time_frame(build_pilot_frame(params)), params.N_CP))
    rx = apply_radar_channel(tx, cfg, params)
    image = doppler_process(receive_frame(rx, params), params)
    files: list[str] = []
    _emit_image(out_dir, "radar", image, files)
    _emit_json(out_dir, "radar_peak.json", _peak_payload(image, params), files)
    return files


def _cmd_mimo(config: dict, out_dir: Path) -> list[str]:
    params = _params_from(config)
    m = config["mimo"]
    cfg = RadarChannelConfig(
        targets=_targets_from(config), snr_db=config["snr_db"], rng_seed=config["seed"]
    )
    files: list[str] = []
    for p in range(m["num_tx"]):
        mimo = MimoConfig(num_tx=m["num_tx"], tx=p, num_rx=max(m["num_rx"], 1), rx=m["rx"])
        tx = serialize(add_cp(to_time_frame(build_mimo_pilot_frame(params, mimo)), params.N_CP))
        rx = apply_radar_channel(tx, cfg, params)
        cir = mimo_demux(receive_frame(rx, params), mimo)
        image = doppler_process(cir, params, mode=f"MIMO(p={p},q={m['rx']})")
        _emit_image(out_dir, f"mimo_p{p}", image, files)
        _emit_json(out_dir, f"mimo_p{p}_peak.json", _peak_payload(image, params), files)
    return files


def _cmd_radcom(config: dict, out_dir: Path) -> list[str]:
    base = _params_from(config)
    rc = config["radcom"]
    params = WaveformParams(base.N, base.M, rc["N_CP"], base.B, base.fc)
    spec = RadComFrameSpec(rc["N_CP"], rc["pilot_energy"], rc["symbol_energy"])
    n_data = spec.num_data_subchirps(params.N)

    rng = np.random.default_rng(config["seed"])
    bits = rng.integers(0, 2, size=2 * n_data * params.M)
    symbols = (np.sqrt(spec.symbol_energy) * qpsk_map(bits)).reshape(n_data, params.M)
    frame = build_radcom_frame(params, spec, symbols)
    tx = serialize(add_cp(to_time_frame(frame), params.N_CP))

    cfg = RadarChannelConfig(
        targets=_targets_from(config), snr_db=config["snr_db"], rng_seed=config["seed"]
    )
    rx = apply_radar_channel(tx, cfg, params)
    fresnel = receive_frame(rx, params)
    image = doppler_process(radcom_extract_cir(fresnel, rc["N_CP"]), params, mode="RADCOM")

    files: list[str] = []
    _emit_image(out_dir, "radcom", image, files)
    _emit_json(out_dir, "radcom_peak.json", _peak_payload(image, params), files)

    # Communication leg over the configured frequency-selective channel.
    comm = config["comm"]
    if comm["cfr_csv"] is not None:
        ch = CommChannelConfig(
            cfr=load_cfr_csv(comm["cfr_csv"], params.N),
            snr_db=comm["snr_db"],
            rng_seed=config["seed"] + 1,
        )
    else:
        ch = CommChannelConfig(
            cir=two_tap_tilt_cir(comm["tilt_db"]),
            snr_db=comm["snr_db"],
            rng_seed=config["seed"] + 1,
        )
    rx_comm = apply_comm_channel(tx, ch, params)
    comm_frame = receive_frame(rx_comm, params, correct_fold=False)
    avg = rc["avg_symbols"] or params.M
    cfr_est = estimate_comm_cfr(
        comm_frame, rc["N_CP"], avg, pilot_amplitude=np.sqrt(spec.pilot_energy)
    )
    recovered = equalize_and_extract(comm_frame, cfr_est, spec)
    rx_bits = qpsk_demap(recovered)
    errors = int(np.count_nonzero(rx_bits != bits))
    report = evm_and_snr(
        recovered, symbols, bit_errors=errors, data_rate_bps=data_rate_radcom(params)
    )
    _emit_json(
        out_dir,
        "comm_report.json",
        {
            "evm_mean_db": report.evm_mean_db,
            "evm_std_db": report.evm_std_db,
            "est_snr_db": report.est_snr_db,
            "bit_errors": report.bit_errors,
            "total_bits": int(bits.size),
            "data_rate_bps": report.data_rate_bps,
        },
        files,
    )

    constellation = np.column_stack(
        [
            recovered.real.flatten(order="F"),
            recovered.imag.flatten(order="F"),
            np.tile(np.arange(n_data), params.M),
        ]
    )
    np.savetxt(
        out_dir / "constellation.csv",
        constellation,
        delimiter=",",
        fmt="%.12g",
        header="re,im,subchirp",
        comments="",
    )
    files.append("constellation.csv")
    return files


def _cmd_sweep(config: dict, out_dir: Path, parallelism: int) -> list[str]:
    params = _params_from(config)
    result = doppler_tolerance_sweep(
        params, config["sweep"]["n_grid"], config["sweep"]["k_grid"], parallelism=parallelism
    )
    files: list[str] = []
    surfaces = {
        "pplr": result.pplr_db,
        "pslr": result.pslr_db,
        "islr": result.islr_db,
    }
    for name, surface in surfaces.items():
        rows = [
            (result.n_grid[i], result.k_grid[j], surface[i, j])
            for i in range(result.n_grid.size)
            for j in range(result.k_grid.size)
        ]
        np.savetxt(
            out_dir / f"sweep_{name}.csv",
            np.asarray(rows),
            delimiter=",",
            fmt="%.12g",
            header="n_delta,k_delta,value_db",
            comments="",
        )
        files.append(f"sweep_{name}.csv")
    flat = result.pplr_db.ravel()
    worst = int(np.argmin(flat))
    summary = {
        "pplr_min_db": float(result.pplr_db.min()),
        "pplr_max_db": float(result.pplr_db.max()),
        "worst_point": {
            "n_delta": float(result.n_grid[worst // result.k_grid.size]),
            "k_delta": float(result.k_grid[worst % result.k_grid.size]),
        },
    }
    _emit_json(out_dir, "sweep_summary.json", summary, files)
    return files


def _cmd_papr(config: dict, out_dir: Path) -> list[str]:
    params = _params_from(config)
    pc = config["papr"]
    rc = config["radcom"]
    spec = RadComFrameSpec(rc["N_CP"], rc["pilot_energy"], rc["symbol_energy"])
    builders = {
        "pilot": pilot_symbol_builder(params),
        "radcom": radcom_symbol_builder(params, spec),
        "ofdm": ofdm_symbol_builder(params),
    }
    files: list[str] = []
    summary = {}
    for i, name in enumerate(pc["waveforms"]):
        ccdf = papr_ccdf(
            builders[name],
            trials=pc["trials"],
            oversample=pc["oversample"],
            rng_seed=config["seed"] + i,
        )
        np.savetxt(
            out_dir / f"papr_{name}.csv",
            np.column_stack([ccdf.thresholds_db, ccdf.exceedance]),
            delimiter=",",
            fmt="%.12g",
            header="threshold_db,exceedance",
            comments="",
        )
        files.append(f"papr_{name}.csv")
        summary[name] = {
            "mean_papr_db": ccdf.mean_papr_db,
            "papr_at_1e-2_db": ccdf.papr_at_probability(1e-2),
        }
    _emit_json(out_dir, "papr_summary.json", summary, files)
    return files


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ocdm-radar",
        description="Fresnel-domain OCDM radar / RadCom simulation toolkit",
    )
    parser.add_argument("command", choices=["selftest", "params", "radar", "mimo", "radcom", "sweep", "papr"])
    parser.add_argument("--config", help="JSON scenario config", default=None)
    parser.add_argument("--out", help="output directory", default=None)
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument(
        "--full-scale",
        action="store_true",
        help="default to the full-scale reference numerology instead of desk scale",
    )
    parser.add_argument("--parallelism", type=int, default=1, help="sweep worker processes")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "selftest":
        return EXIT_OK if run_selftest() else EXIT_RUNTIME

    raw = {}
    if args.config is not None:
        try:
            raw = json.loads(Path(args.config).read_text())
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return EXIT_SCHEMA
        except json.JSONDecodeError as exc:
            print(f"error: config is not valid JSON: {exc}", file=sys.stderr)
            return EXIT_SCHEMA

    try:
        config = resolve_config(raw, full_scale=args.full_scale)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA

    if args.seed is not None:
        config["seed"] = args.seed

    out_dir = Path(
        args.out
        or config["output_dir"]
        or os.environ.get(OUTPUT_DIR_ENV)
        or "ocdm_radar_out"
    )
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    try:
        if args.command == "params":
            files = _cmd_params(config, out_dir)
        elif args.command == "radar":
            files = _cmd_radar(config, out_dir)
        elif args.command == "mimo":
            files = _cmd_mimo(config, out_dir)
        elif args.command == "radcom":
            files = _cmd_radcom(config, out_dir)
        elif args.command == "sweep":
            files = _cmd_sweep(config, out_dir, args.parallelism)
        else:
            files = _cmd_papr(config, out_dir)
    except ValueError as exc:
        print(f"error: precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except Exception as exc:  # noqa: BLE001 - reported as runtime failure
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    _write_manifest(out_dir, args.command, config, files)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
