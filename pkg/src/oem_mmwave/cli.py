"""Command-line front end: design, channel, waterfill, simulate, scenario.

Every subcommand that writes files also writes a JSON run manifest next
to them (same path with a ``.manifest.json`` suffix) echoing the fully
resolved configuration, seed, and output paths.  All output is
deterministic for a fixed seed; the optional OEM_THREADS environment
variable caps internal worker counts and never changes results (the
current implementation is vectorized single-process).

Exit codes: 0 success, 2 invalid flags, 3 config-schema violation,
4 simulation error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .antenna import PatchSpec, design_dish, design_patch, feed_impedance
from .capacity import FadingModel, sweep
from .channel import build_mode_channels, mode_power_profile, VARIANTS
from .config import OemConfig
from .errors import InvalidConfigError, OemError
from .geometry import scenario_check
from .waterfill import SnrGrid, waterfill_instantaneous

SPEED_OF_LIGHT = 299_792_458.0

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_SIMULATION = 4


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _write_manifest(command: str, config_echo: dict, seed, outputs: list[str]) -> None:
    if not outputs:
        return
    manifest = {
        "command": command,
        "config_echo": config_echo,
        "seed": seed,
        "version": __version__,
        "outputs": outputs,
    }
    path = Path(outputs[0]).with_suffix(Path(outputs[0]).suffix + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _load_config(path: str) -> OemConfig:
    try:
        return OemConfig.load(path)
    except OSError as exc:
        raise InvalidConfigError(str(exc)) from exc


# -- design --------------------------------------------------------------


def _cmd_design_patch(args) -> int:
    wavelength = SPEED_OF_LIGHT / (args.freq_ghz * 1e9)
    spec = PatchSpec(
        wavelength=wavelength, eps_r=args.eps_r,
        thickness=args.thickness_mm * 1e-3, z0=args.z0,
    )
    design = design_patch(spec)
    zin = feed_impedance(spec, design, design.feed_offset)
    record = {
        "width_mm": design.width * 1e3,
        "eps_eff": design.eps_eff,
        "guide_wavelength_mm": design.guide_wavelength * 1e3,
        "length_mm": design.length * 1e3,
        "gap_correction_mm": design.gap_correction * 1e3,
        "feed_offset_mm": design.feed_offset * 1e3,
        "xi_re": design.xi_re,
        "feed_impedance_ohm": [zin.real, zin.imag],
    }
    print(json.dumps(record, indent=2))
    return EXIT_OK


def _cmd_design_dish(args) -> int:
    wavelength = SPEED_OF_LIGHT / (args.freq_ghz * 1e9)
    design = design_dish(args.gain_db, args.efficiency, args.kappa, wavelength)
    record = {
        "diameter_mm": design.diameter * 1e3,
        "focal_length_mm": design.focal_length * 1e3,
        "kappa": design.kappa,
        "surface_per_mm": design.surface * 1e-3,
    }
    print(json.dumps(record, indent=2))
    return EXIT_OK


# -- channel -------------------------------------------------------------


def _cmd_channel(args) -> int:
    cfg = _load_config(args.config)
    channels = build_mode_channels(cfg, kind=args.model)
    if args.mode is not None and not (0 <= args.mode < cfg.u_elems):
        print(f"mode must lie in 0..{cfg.u_elems - 1}", file=sys.stderr)
        return EXIT_USAGE
    rows = []
    for ch in channels:
        if args.mode is not None and ch.mode != args.mode:
            continue
        for m in range(cfg.m_rx):
            for n in range(cfg.n_tx):
                entry = ch.matrix[m, n]
                rows.append((ch.mode, m + 1, n + 1, entry.real, entry.imag))
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["mode", "m", "n", "re", "im"])
        for mode, m, n, re, im in rows:
            writer.writerow([mode, m, n, _fmt(re), _fmt(im)])
    _write_manifest("channel", cfg.to_json_dict(), None, [args.out])
    return EXIT_OK


# -- waterfill -----------------------------------------------------------


def _cmd_waterfill(args) -> int:
    rows = []
    try:
        with open(args.snr_csv, newline="") as fh:
            for row in csv.DictReader(fh):
                rows.append((int(row["i"]), int(row["l"]), float(row["gamma"])))
    except (OSError, KeyError, ValueError) as exc:
        print(f"bad SNR csv: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not rows:
        print("SNR csv holds no channels", file=sys.stderr)
        return EXIT_CONFIG
    if any(r[0] < 0 or r[1] < 0 for r in rows):
        print("bad SNR csv: stream/mode indices must be nonnegative", file=sys.stderr)
        return EXIT_CONFIG
    n_streams = max(r[0] for r in rows) + 1
    n_modes = max(r[1] for r in rows) + 1
    grid = np.zeros((n_streams, n_modes))
    for i, l, gamma in rows:
        grid[i, l] = gamma
    try:
        policy = waterfill_instantaneous(SnrGrid(values=grid), args.total_power)
    except OemError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["i", "l", "gamma", "power"])
        for i, l, gamma in rows:
            writer.writerow([i, l, _fmt(gamma), _fmt(policy.allocations[i, l])])
    summary_path = str(Path(args.out).with_suffix(".summary.json"))
    summary = {
        "mu_star": policy.mu_star if math.isfinite(policy.mu_star) else None,
        "water_level": policy.water_level,
        "active_count": len(policy.active_set),
    }
    Path(summary_path).write_text(json.dumps(summary, indent=2) + "\n")
    _write_manifest(
        "waterfill", {"snr_csv": args.snr_csv, "total_power": args.total_power},
        None, [args.out, summary_path],
    )
    return EXIT_OK


# -- simulate ------------------------------------------------------------


def _parse_snr_range(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError("expected start:stop:step")
    start, stop, step = (float(p) for p in parts)
    if step <= 0.0 or stop < start:
        raise ValueError("need step > 0 and stop >= start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + k * step for k in range(count)]


def _cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    try:
        snr_list = _parse_snr_range(args.snr_db)
    except ValueError as exc:
        print(f"bad --snr-db: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        profile = mode_power_profile(cfg, convergent=(args.model == "convergent"))
        if args.model == "exact":
            # The exact-sum and Bessel forms share the same magnitude
            # profile in the large-U limit; use the Bessel profile.
            profile = mode_power_profile(cfg, convergent=False)
        fading = FadingModel(
            mean_snr_db=0.0, mode_profile=profile, normalization=args.normalization,
        )
        oem_curve, mimo_curve = sweep(
            cfg, fading, snr_list, args.total_power, args.trials, args.seed
        )
    except OemError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["snr_db", "se_oem", "se_oem_stderr", "se_mimo", "se_mimo_stderr"])
        for op, mp in zip(oem_curve.points, mimo_curve.points):
            writer.writerow([
                _fmt(op.mean_snr_db), _fmt(op.se), _fmt(op.stderr),
                _fmt(mp.se), _fmt(mp.stderr),
            ])
    config_echo = {
        "config": cfg.to_json_dict(),
        "model": args.model,
        "normalization": args.normalization,
        "mode_profile": [float(g) for g in fading.mode_profile],
        "snr_db": snr_list,
        "trials": args.trials,
        "total_power": args.total_power,
    }
    _write_manifest("simulate", config_echo, args.seed, [args.out])
    return EXIT_OK


# -- scenario ------------------------------------------------------------


def _cmd_scenario(args) -> int:
    cfg = _load_config(args.config)
    try:
        report = scenario_check(cfg)
    except OemError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    record = {
        "scenario": report.scenario,
        "use_oem": report.use_oem,
        "d_adjacent_uca_mm": report.d_adjacent_uca * 1e3,
        "d_adjacent_element_mm": report.d_adjacent_element * 1e3,
        "wavelength_mm": report.wavelength * 1e3,
        "wavelength_interval_mm": (
            None if report.interval_empty
            else [report.wavelength_min * 1e3, report.wavelength_max * 1e3]
        ),
        "no_valid_wavelength": report.interval_empty,
    }
    print(json.dumps(record, indent=2))
    return EXIT_OK


# -- parser --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oem-sim",
        description="OAM-embedded massive-MIMO mmWave link simulator",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    design = sub.add_parser("design", help="closed-form antenna design calculators")
    design_sub = design.add_subparsers(dest="design_kind", required=True)
    patch = design_sub.add_parser("patch", help="rectangular microstrip patch element")
    patch.add_argument("--freq-ghz", type=float, required=True)
    patch.add_argument("--eps-r", type=float, required=True)
    patch.add_argument("--thickness-mm", type=float, required=True)
    patch.add_argument("--z0", type=float, default=50.0)
    patch.set_defaults(func=_cmd_design_patch)
    dish = design_sub.add_parser("dish", help="converging parabolic reflector")
    dish.add_argument("--gain-db", type=float, required=True)
    dish.add_argument("--efficiency", type=float, required=True)
    dish.add_argument("--kappa", type=float, required=True)
    dish.add_argument("--freq-ghz", type=float, required=True)
    dish.set_defaults(func=_cmd_design_dish)

    channel = sub.add_parser("channel", help="dump per-mode channel matrices as CSV")
    channel.add_argument("--config", required=True)
    channel.add_argument("--mode", type=int, default=None)
    channel.add_argument("--model", choices=VARIANTS, default="convergent")
    channel.add_argument("--out", required=True)
    channel.set_defaults(func=_cmd_channel)

    waterfill = sub.add_parser("waterfill", help="instantaneous water-filling on a gamma CSV")
    waterfill.add_argument("--snr-csv", required=True)
    waterfill.add_argument("--total-power", type=float, required=True)
    waterfill.add_argument("--out", required=True)
    waterfill.set_defaults(func=_cmd_waterfill)

    simulate = sub.add_parser("simulate", help="ergodic SE sweep, OEM vs MIMO baseline")
    simulate.add_argument("--config", required=True)
    simulate.add_argument("--snr-db", required=True, help="start:stop:step in dB")
    simulate.add_argument("--trials", type=int, required=True)
    simulate.add_argument("--seed", type=int, required=True)
    simulate.add_argument("--out", required=True)
    simulate.add_argument("--model", choices=("exact", "bessel", "convergent"),
                          default="convergent")
    simulate.add_argument("--normalization", choices=("per-channel", "total"),
                          default="per-channel")
    simulate.add_argument("--total-power", type=float, default=1.0)
    simulate.set_defaults(func=_cmd_simulate)

    scenario = sub.add_parser("scenario", help="wavelength-regime check")
    scenario.add_argument("--config", required=True)
    scenario.set_defaults(func=_cmd_scenario)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except InvalidConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OemError as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return EXIT_SIMULATION


if __name__ == "__main__":
    sys.exit(main())
