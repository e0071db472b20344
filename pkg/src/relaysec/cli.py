"""Command-line front door.

Subcommands: analyze | simulate | sweep | codec-encode | codec-decode.
Common flags: --config PATH, --out PATH, --format csv|json, --seed U64,
--trials U64 (flags override the config document). Exit codes: 0 success,
2 configuration or input error, 3 numeric failure (slot cap exceeded).

Tables use a fixed column set; floats are rendered with shortest
round-trip formatting and '.' decimal so identical (config, seed, trials)
runs produce byte-identical files. Oracle-vs-print discrepancies found
while evaluating the jamming bounds are appended as a deviations report:
embedded under a "deviations" key for JSON output, written to
``<out>.deviations.json`` next to CSV output, or to stderr when the table
goes to stdout.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional

from . import codec
from .analytic import Deviation
from .config import ConfigError, RunConfig, load_config
from .packetfile import PacketFileError, read_packet_file, write_packet_file
from .simulator import SlotCapExceeded, SweepRow, sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

COLUMNS = [
    "protocol",
    "K",
    "N",
    "f",
    "alpha",
    "receiver",
    "collusion",
    "p1_analytic",
    "p1_lower",
    "p1_upper",
    "p1_sim",
    "ci_low",
    "ci_high",
    "log10_PI_analytic",
    "log10_PI_sim",
    "trials",
    "seed",
]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return _fmt(value)
    return value


def _row_values(row: SweepRow) -> list:
    return [
        row.protocol,
        row.k_relays,
        row.n_packets,
        row.relay_fraction,
        row.alpha,
        row.receiver,
        row.collusion,
        row.p1_analytic,
        row.p1_lower,
        row.p1_upper,
        row.p1_sim,
        row.ci_low,
        row.ci_high,
        row.log10_pi_analytic,
        row.log10_pi_sim,
        row.trials,
        row.seed,
    ]


def _deviation_record(dev: Deviation) -> dict:
    return {
        "term": dev.term,
        "verbatim": _json_safe(dev.verbatim),
        "corrected": _json_safe(dev.corrected),
        "oracle": _json_safe(dev.oracle),
        "rel_diff": _json_safe(dev.rel_diff),
        "note": dev.note,
    }


def _emit(rows: list[SweepRow], out_path: Optional[str], out_format: str) -> None:
    seen = set()
    deviations = []
    for row in rows:
        for dev in row.deviations:
            key = (dev.term, dev.verbatim, dev.oracle)
            if key not in seen:
                seen.add(key)
                deviations.append(_deviation_record(dev))

    if out_format == "json":
        doc = {
            "columns": COLUMNS,
            "rows": [
                {c: _json_safe(v) for c, v in zip(COLUMNS, _row_values(r))}
                for r in rows
            ],
            "deviations": deviations,
        }
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
        if out_path:
            Path(out_path).write_text(text)
        else:
            sys.stdout.write(text)
        return

    lines = [",".join(COLUMNS)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in _row_values(row)))
    text = "\n".join(lines) + "\n"
    if out_path:
        Path(out_path).write_text(text)
        if deviations:
            Path(out_path + ".deviations.json").write_text(
                json.dumps(deviations, indent=2, sort_keys=True) + "\n"
            )
    else:
        sys.stdout.write(text)
        if deviations:
            sys.stderr.write(json.dumps(deviations, indent=2, sort_keys=True) + "\n")


def _load_run_config(args) -> RunConfig:
    if not args.config:
        raise ConfigError("--config is required for this command")
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.trials is not None:
        cfg = replace(cfg, trials=args.trials)
    if args.out is not None:
        cfg = replace(cfg, output_path=args.out)
    if args.format is not None:
        cfg = replace(cfg, output_format=args.format)
    return cfg


def cmd_analyze(args) -> int:
    cfg = _load_run_config(args)
    axes = cfg.sweep_axes
    if axes is None:
        from .simulator import SweepAxes

        axes = SweepAxes()
    rows = sweep(
        cfg.scenario,
        axes,
        trials=cfg.trials,
        seed=cfg.seed,
        workers=cfg.workers,
        simulate=False,
    )
    _emit(rows, cfg.output_path, cfg.output_format)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _load_run_config(args)
    if cfg.sweep_axes is not None:
        raise ConfigError("'simulate' runs a single point; use the sweep command")
    from .simulator import SweepAxes

    rows = sweep(
        cfg.scenario,
        SweepAxes(),
        trials=cfg.trials,
        seed=cfg.seed,
        workers=cfg.workers,
        simulate=True,
    )
    _emit(rows, cfg.output_path, cfg.output_format)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load_run_config(args)
    if cfg.sweep_axes is None:
        raise ConfigError("'sweep' requires a 'sweep' section in the config")
    rows = sweep(
        cfg.scenario,
        cfg.sweep_axes,
        trials=cfg.trials,
        seed=cfg.seed,
        workers=cfg.workers,
        simulate=True,
    )
    _emit(rows, cfg.output_path, cfg.output_format)
    return EXIT_OK


def cmd_codec_encode(args) -> int:
    if not args.out:
        raise ConfigError("--out is required for codec-encode")
    block, padded = read_packet_file(args.input)
    if padded:
        raise ConfigError("input already carries the pad flag; expected raw packets")
    if block.n_count % 2 == 1:
        block, meta = codec.pad_to_even(block, seed=args.seed or 0)
        out_padded = meta.padded
    else:
        out_padded = False
    encoded = codec.encode(block)
    write_packet_file(args.out, encoded, padded=out_padded)
    return EXIT_OK


def cmd_codec_decode(args) -> int:
    if not args.out:
        raise ConfigError("--out is required for codec-decode")
    block, padded = read_packet_file(args.input)
    if block.n_count % 2 == 1:
        raise ConfigError(
            "encoded files must hold an even packet count; odd count without "
            "a pad is not decodable"
        )
    decoded = codec.decode(block)
    if padded:
        decoded = codec.PacketBlock(decoded.packets[:-1].copy(), decoded.bit_len)
    write_packet_file(args.out, decoded, padded=False)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relaysec",
        description="Intercept-probability analysis and simulation for "
        "untrusted-relay networks with XOR self-encryption coding.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_input=False):
        if with_input:
            p.add_argument("input", help="packet file to transform")
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", help="output file (stdout when omitted)")
        p.add_argument("--format", choices=["csv", "json"], help="table format")
        p.add_argument("--seed", type=int, help="64-bit seed override")
        p.add_argument("--trials", type=int, help="trial count override")

    common(sub.add_parser("analyze", help="closed-form tables, no simulation"))
    common(sub.add_parser("simulate", help="simulate one scenario point"))
    common(sub.add_parser("sweep", help="grid of analytic + simulated rows"))
    common(sub.add_parser("codec-encode", help="self-encrypt a packet file"), True)
    common(sub.add_parser("codec-decode", help="invert codec-encode"), True)
    return parser


_HANDLERS = {
    "analyze": cmd_analyze,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "codec-encode": cmd_codec_encode,
    "codec-decode": cmd_codec_decode,
}


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (ConfigError, PacketFileError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SlotCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
