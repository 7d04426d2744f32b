"""Command-line front end: filter design, synthesis, diagnostics, BER sweeps.

Everything is emitted as CSV with a config-echo comment header so runs are
reproducible byte for byte from (config file, seed).  Exit codes: 0 on
success, 1 on usage/config errors, 2 when any BER point under-converged.
"""

from __future__ import annotations

import argparse
import sys

import jsonschema
import numpy as np
import yaml

from . import __version__
from . import analysis, simulation, transceiver
from .channel import ChannelProfile
from .fdss import DEFAULT_DEVIATION
from .simulation import LinkConfig, WAVEFORMS, design_filter
from .transceiver import DataFrame, FrameConfig

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNDERCONVERGED = 2


class UsageError(Exception):
    pass


CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["waveform"],
    "properties": {
        "waveform": {"enum": list(WAVEFORMS)},
        "deviation": {"type": "number", "exclusiveMinimum": 0},
        "n_harmonics": {"type": "integer", "minimum": 1},
        "output_dir": {"type": "string"},
        "frame": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "subcarriers": {"type": "integer", "minimum": 1},
                "idft_size": {"type": "integer", "minimum": 1},
                "cp_len": {"type": "integer", "minimum": 0},
                "repetition": {"type": "integer", "minimum": 1},
            },
        },
        "channel": {
            "type": "object",
            "additionalProperties": False,
            "required": ["type"],
            "properties": {
                "type": {"enum": ["awgn", "multipath"]},
                "tap_powers_db": {"type": "array", "items": {"type": "number"}, "minItems": 1},
                "rician_k": {"type": "number", "minimum": 0},
                "tap_delays": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "ebn0_db": {"type": "array", "items": {"type": "number"}, "minItems": 1},
                "min_bits": {"type": "integer", "minimum": 10000},
                "min_errors": {"type": "integer", "minimum": 1},
                "max_frames": {"type": "integer", "minimum": 1},
                "seed": {"type": "integer"},
            },
        },
        "analysis": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "snr_db": {"type": "array", "items": {"type": "number"}, "minItems": 1},
                "psd_frames": {"type": "integer", "minimum": 1},
            },
        },
    },
}


def load_config(path) -> dict:
    """Read and schema-validate a YAML run configuration."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    except yaml.YAMLError as exc:
        raise UsageError(f"malformed YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise UsageError("config must be a mapping")
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for err in errors:
            where = "/".join(str(p) for p in err.absolute_path) or "<root>"
            lines.append(f"  {where}: {err.message}")
        raise UsageError("invalid config:\n" + "\n".join(lines))
    return raw


def link_config_from(raw: dict) -> LinkConfig:
    frame = FrameConfig(**raw.get("frame", {}))
    ch = raw.get("channel", {"type": "awgn"})
    if ch["type"] == "awgn":
        profile = None
    else:
        profile = ChannelProfile(
            tuple(ch.get("tap_powers_db", (0.0, -10.0, -20.0))),
            float(ch.get("rician_k", 10.0)),
            tuple(ch.get("tap_delays", (0, 1, 2))),
        )
    sweep = raw.get("sweep", {})
    try:
        return LinkConfig(
            frame=frame,
            waveform=raw["waveform"],
            deviation=float(raw.get("deviation", DEFAULT_DEVIATION)),
            channel_profile=profile,
            ebn0_grid_db=tuple(sweep.get("ebn0_db", (0.0, 2.0, 4.0, 6.0, 8.0))),
            min_bits=int(sweep.get("min_bits", 100_000)),
            min_errors=int(sweep.get("min_errors", 100)),
            max_frames=int(sweep.get("max_frames", 100_000)),
            seed=int(sweep.get("seed", 0)),
            n_harmonics=int(raw.get("n_harmonics", simulation.TRIANGULAR_HARMONICS)),
        )
    except ValueError as exc:
        raise UsageError(f"invalid config: {exc}") from exc


def _echo_header(raw: dict) -> str:
    echo = yaml.safe_dump(raw, sort_keys=True, default_flow_style=True, width=10_000).strip()
    return f"# chirplink {__version__}\n# config: {echo}\n"


def cmd_design(args) -> int:
    try:
        filt = design_filter(args.waveform, args.deviation, args.subcarriers, args.harmonics)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    filt.export_csv(args.out)
    ratio = filt.magnitude_ratio()
    print(f"wrote {args.out}: {filt.m} coefficients, k = {filt.l_down}..{filt.l_up}")
    print(f"truncation loss: {filt.truncation_loss:.6e}")
    print(f"max/min |c_k|: {ratio:.6g}" if np.isfinite(ratio) else "max/min |c_k|: inf")
    return EXIT_OK


def parse_data_spec(spec: str, n_symbols: int) -> np.ndarray:
    """Parse ``idx=value,idx=value`` into a sparse symbol vector."""
    if not spec or not spec.strip():
        raise UsageError("empty data spec; expected e.g. 0=1,75=1")
    d = np.zeros(n_symbols, dtype=complex)
    for item in spec.split(","):
        if "=" in item:
            idx_s, val_s = item.split("=", 1)
        else:
            idx_s, val_s = item, "1"
        try:
            idx = int(idx_s)
            val = complex(val_s)
        except ValueError as exc:
            raise UsageError(f"bad data spec entry {item!r}") from exc
        if not 0 <= idx < n_symbols:
            raise UsageError(f"symbol index {idx} out of range 0..{n_symbols - 1}")
        d[idx] = val
    return d


def cmd_synthesize(args) -> int:
    raw = load_config(args.config)
    cfg = link_config_from(raw)
    frame = cfg.frame
    filt = design_filter(cfg.waveform, cfg.deviation, frame.subcarriers, cfg.n_harmonics)
    data = parse_data_spec(args.data, frame.symbols_per_frame)
    tx = transceiver.modulate(DataFrame(data), filt, frame)
    header = _echo_header(raw)

    time_path = f"{args.out_prefix}time.csv"
    with open(time_path, "w", encoding="ascii") as fh:
        fh.write(header)
        fh.write(f"# cp_len: {frame.cp_len}\n")
        fh.write("sample,re,im\n")
        for i, v in enumerate(tx.samples):
            fh.write(f"{i},{v.real:.9e},{v.imag:.9e}\n")

    body = tx.samples[frame.cp_len :]
    spec = analysis.spectrogram(body, win_len=args.win_len, hop=args.hop)
    spec_path = f"{args.out_prefix}spectrogram.csv"
    with open(spec_path, "w", encoding="ascii") as fh:
        fh.write(header)
        fh.write(f"# win_len: {args.win_len} hop: {args.hop}\n")
        fh.write("start," + ",".join(f"bin{i}" for i in range(spec.shape[1])) + "\n")
        for i, row in enumerate(spec):
            fh.write(f"{i * args.hop}," + ",".join(f"{v:.4f}" for v in row) + "\n")
    print(f"wrote {time_path} and {spec_path}")
    return EXIT_OK


def cmd_ber(args) -> int:
    raw = load_config(args.config)
    cfg = link_config_from(raw)
    curve = simulation.run_ber_sweep(cfg)
    curve.to_csv(args.out)
    for p in curve.points:
        tag = "" if p.converged else "  UNDER-CONVERGED"
        print(
            f"Eb/N0 {p.ebn0_db:6.2f} dB: sim {p.simulated_ber:.3e}"
            f"  theory {p.theoretical_ber:.3e}  ({p.error_count} errors){tag}"
        )
    print(f"wrote {args.out}")
    return EXIT_UNDERCONVERGED if curve.under_converged else EXIT_OK


def cmd_analyze(args) -> int:
    raw = load_config(args.config)
    cfg = link_config_from(raw)
    frame = cfg.frame
    ana = raw.get("analysis", {})
    header = _echo_header(raw)
    if args.mode == "snrpost":
        filt = design_filter(cfg.waveform, cfg.deviation, frame.subcarriers, cfg.n_harmonics)
        snr_grid = ana.get("snr_db", list(np.arange(-10.0, 31.0, 2.0)))
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(header)
            fh.write(f"# repetition: {frame.repetition}\n")
            fh.write("snr_db,snr_post_db,alpha_mmse\n")
            for s in snr_grid:
                rep = analysis.snr_post(filt, 10.0 ** (s / 10.0), frame.repetition)
                post_db = 10.0 * np.log10(rep.snr_post) if not rep.saturated else np.inf
                fh.write(f"{s:.6f},{post_db:.6f},{rep.alpha_mmse:.9e}\n")
    elif args.mode == "psd":
        filt = design_filter(cfg.waveform, cfg.deviation, frame.subcarriers, cfg.n_harmonics)
        n_frames = int(ana.get("psd_frames", 1000))
        rng = np.random.default_rng(cfg.seed)
        bodies = np.empty(n_frames * frame.idft_size, dtype=complex)
        for i in range(n_frames):
            bits = rng.integers(0, 2, frame.bits_per_frame)
            tx = transceiver.modulate(DataFrame.from_bits(bits), filt, frame)
            bodies[i * frame.idft_size : (i + 1) * frame.idft_size] = tx.samples[frame.cp_len :]
        p = analysis.psd(bodies, frame.idft_size, n_frames)
        shift = np.fft.fftshift(p)
        freqs = np.fft.fftshift(np.fft.fftfreq(frame.idft_size) * frame.idft_size).astype(int)
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(header)
            fh.write(f"# frames: {n_frames}\n")
            fh.write("subcarrier,psd_db\n")
            for k, v in zip(freqs, shift):
                fh.write(f"{k},{v:.6f}\n")
    elif args.mode == "papr":
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(header)
            fh.write("waveform,single_chirp_papr_db,random_frame_papr_db\n")
            for wf in WAVEFORMS:
                filt = design_filter(wf, cfg.deviation, frame.subcarriers, cfg.n_harmonics)
                d = np.zeros(frame.symbols_per_frame, dtype=complex)
                d[0] = 1.0
                single = transceiver.modulate(DataFrame(d), filt, frame)
                single_papr = analysis.papr(single.samples[frame.cp_len :])
                rng = np.random.default_rng(cfg.seed)
                vals = []
                for _ in range(100):
                    bits = rng.integers(0, 2, frame.bits_per_frame)
                    tx = transceiver.modulate(DataFrame.from_bits(bits), filt, frame)
                    vals.append(analysis.papr(tx.samples[frame.cp_len :]))
                fh.write(f"{wf},{single_papr:.4f},{np.mean(vals):.4f}\n")
    else:
        raise UsageError(f"unknown analyze mode {args.mode!r}")
    print(f"wrote {args.out}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chirplink", description=__doc__)
    parser.add_argument("--version", action="version", version=f"chirplink {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="design a shaping filter and write it as CSV")
    p.add_argument("--waveform", required=True, choices=WAVEFORMS)
    p.add_argument("--deviation", type=float, default=DEFAULT_DEVIATION)
    p.add_argument("--subcarriers", type=int, required=True)
    p.add_argument("--harmonics", type=int, default=simulation.TRIANGULAR_HARMONICS)
    p.add_argument("--out", default="filter.csv")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("synthesize", help="synthesize a frame and its spectrogram")
    p.add_argument("--config", required=True)
    p.add_argument("--data", required=True, help="active symbols, e.g. 0=1,75=1")
    p.add_argument("--out-prefix", default="synth_")
    p.add_argument("--win-len", type=int, default=64)
    p.add_argument("--hop", type=int, default=8)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("ber", help="run a Monte Carlo BER sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="ber.csv")
    p.set_defaults(func=cmd_ber)

    p = sub.add_parser("analyze", help="PSD / PAPR / post-equalization SNR reports")
    p.add_argument("--config", required=True)
    p.add_argument("--mode", required=True, choices=["psd", "papr", "snrpost"])
    p.add_argument("--out", default="analysis.csv")
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
