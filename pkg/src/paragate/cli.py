"""Command-line entry point.

One subcommand per experiment: calibrate, trajectory, robustness, cz,
ramsey, rb, synth.  Options may also be supplied through a JSON config
file (--config); explicit flags win over the file, the file wins over
defaults.  Every run writes `<experiment>_<preset>_<timestamp>.{csv,json,png}`
into the output directory (flag, else the PARAGATE_OUTPUT_DIR environment
variable, else the current directory) and prints a one-line summary.

Exit codes: 0 success, 1 configuration error, 2 numerical/convergence error.
"""

from __future__ import annotations

import json
import math
import sys

import click
import numpy as np

from . import __version__, report
from .device import FluxInversionError, load_preset
from .dynamics import StepSizeError
from .experiments import (DepolarizingModel, IdealModel, LindbladModel,
                          calibrate_effective_coupling, cz_gate,
                          interleaved_error_rate, ramsey_conditional_phase,
                          robustness_scan, run_rb, trajectory)
from .experiments.calibration import CalibrationRangeError
from .experiments.cz import RamseyFitError, TrimCalibrationError
from .pulses import (BesselCeilingError, base_schedule, default_swap_amplitude,
                     modulation_params, repeat_schedule,
                     superadiabatic_schedule, waveform)

_MHZ = 2.0 * math.pi * 1e6


class ConfigError(click.ClickException):
    """Invalid run configuration (exit code 1)."""

    exit_code = 1


NUMERICAL_ERRORS = (BesselCeilingError, CalibrationRangeError,
                    FluxInversionError, RamseyFitError, StepSizeError,
                    TrimCalibrationError)

_TIME_UNITS = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9}


def parse_duration(value, field: str) -> float:
    """Parse '80ns' / '0.5us' / bare seconds into seconds, requiring > 0."""
    if isinstance(value, (int, float)):
        seconds = float(value)
    else:
        text = str(value).strip()
        unit = 1.0
        for suffix in ("ns", "us", "ms", "s"):
            if text.endswith(suffix):
                unit = _TIME_UNITS[suffix]
                text = text[: -len(suffix)]
                break
        try:
            seconds = float(text) * unit
        except ValueError:
            raise ConfigError(
                f"{field}: cannot parse duration {value!r} "
                f"(expected e.g. '80ns', '0.5us', or seconds)") from None
    if not seconds > 0.0:
        raise ConfigError(f"{field} must be > 0, got {value!r}")
    return seconds


def resolve_config(config_path, flags: dict, defaults: dict,
                   duration_fields: tuple = ()) -> dict:
    """Merge defaults <- config file <- explicit flags, then validate."""
    resolved = dict(defaults)
    if config_path is not None:
        try:
            with open(config_path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must contain a JSON object")
        unknown = set(data) - set(defaults)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        resolved.update(data)
    resolved.update({k: v for k, v in flags.items() if v is not None})
    for field in duration_fields:
        if resolved[field] is not None:
            resolved[field] = parse_duration(resolved[field], field)
    return resolved


def _load_device(cfg: dict):
    try:
        return load_preset(cfg["preset"], path=cfg.get("preset_file"))
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        raise ConfigError(str(exc)) from exc


def _emit(experiment: str, cfg: dict, header, rows, metadata: dict,
          plot) -> dict:
    """Write the CSV/JSON/PNG triple and return the path mapping."""
    paths = report.artifact_paths(cfg["output_dir"], experiment, cfg["preset"])
    report.write_csv(paths["csv"], header, rows)
    payload = {"experiment": experiment, "version": __version__,
               "config": {k: v for k, v in cfg.items() if k != "output_dir"},
               **metadata}
    report.write_json(paths["json"], payload)
    plot(paths["png"])
    click.echo(f"wrote {paths['csv']} (+ .json, .png)")
    return paths


def _common_options(func):
    for deco in (
        click.option("--config", "config_path", type=click.Path(),
                     default=None, help="JSON config file; flags win."),
        click.option("--preset", default=None, help="Device preset name."),
        click.option("--preset-file", default=None, type=click.Path(),
                     help="Custom preset JSON file."),
        click.option("--output-dir", default=None,
                     envvar="PARAGATE_OUTPUT_DIR",
                     help="Artifact directory (env PARAGATE_OUTPUT_DIR)."),
        click.option("--dt", default=None,
                     help="Integration step, e.g. '0.1ns'."),
    ):
        func = deco(func)
    return func


def _base_defaults(preset: str) -> dict:
    return {"preset": preset, "preset_file": None, "output_dir": ".",
            "dt": "0.1ns"}


@click.group()
@click.version_option(__version__)
def cli():
    """Superadiabatic parametric-gate simulator and waveform synthesizer."""


@cli.command()
@_common_options
@click.option("--amp-min", type=float, default=None,
              help="Smallest modulation amplitude.")
@click.option("--amp-max", type=float, default=None,
              help="Largest modulation amplitude.")
@click.option("--points", type=int, default=None,
              help="Number of amplitude points.")
@click.option("--t-max", default=None,
              help="Maximum evolution time per amplitude.")
def calibrate(config_path, **flags):
    """Effective coupling vs modulation amplitude (Bessel calibration)."""
    defaults = _base_defaults("swap-point") | {
        "amp_min": 0.2, "amp_max": 1.8, "points": 20, "t_max": "500ns"}
    cfg = resolve_config(config_path, flags, defaults, ("dt", "t_max"))
    if cfg["points"] < 2:
        raise ConfigError("points must be >= 2")
    if not 0.0 < cfg["amp_min"] < cfg["amp_max"]:
        raise ConfigError("need 0 < amp_min < amp_max")
    dev = _load_device(cfg)
    amplitudes = np.linspace(cfg["amp_min"], cfg["amp_max"], cfg["points"])
    result = calibrate_effective_coupling(dev, amplitudes,
                                          t_max=cfg["t_max"], dt=cfg["dt"])
    from scipy.special import j1 as bessel_j1
    rows = zip(result.amplitudes, result.g_eff / _MHZ,
               result.fitted_g * bessel_j1(result.amplitudes) / _MHZ)
    _emit("calibrate", cfg, ["amplitude", "g_eff_mhz", "fit_mhz"], rows,
          {"fitted_g_mhz": result.fitted_g / _MHZ,
           "max_g_eff_mhz": result.max_g_eff / _MHZ,
           "t_ql_ns": result.t_ql * 1e9},
          lambda p: report.plot_calibration(p, result, dev))
    click.echo(f"calibrate: fitted g/2pi = {result.fitted_g / _MHZ:.3f} MHz, "
               f"max g_eff/2pi = {result.max_g_eff / _MHZ:.3f} MHz, "
               f"T_QL ≈ {result.t_ql * 1e9:.0f} ns")


@cli.command("trajectory")
@_common_options
@click.option("--scheme", default=None,
              type=click.Choice(["superadiabatic", "adiabatic"]))
@click.option("--T", "t_gate", default=None, help="Transfer duration.")
@click.option("--omega0-mhz", type=float, default=None,
              help="Peak Rabi rate override (MHz).")
@click.option("--decoherence/--ideal", "decoherence", default=None)
def trajectory_cmd(config_path, **flags):
    """Bloch-sphere trajectory of the |01> -> |10> transfer."""
    defaults = _base_defaults("swap-point") | {
        "scheme": "superadiabatic", "t_gate": "80ns", "omega0_mhz": None,
        "decoherence": False}
    cfg = resolve_config(config_path, flags, defaults, ("dt", "t_gate"))
    dev = _load_device(cfg)
    omega0 = None if cfg["omega0_mhz"] is None else cfg["omega0_mhz"] * _MHZ
    result = trajectory(cfg["scheme"], cfg["t_gate"], dev,
                        decoherence=cfg["decoherence"], omega0=omega0,
                        dt=cfg["dt"])
    rows = zip(result.times * 1e9, result.bloch[:, 0], result.bloch[:, 1],
               result.bloch[:, 2], result.p_up, result.p_down)
    _emit("trajectory", cfg, ["t_ns", "x", "y", "z", "p01", "p10"], rows,
          {"final_p10": result.p_down[-1],
           "max_abs_y": float(np.max(np.abs(result.bloch[:, 1])))},
          lambda p: report.plot_trajectory(p, result))
    click.echo(f"trajectory: {cfg['scheme']}, final P(|10>) = "
               f"{result.p_down[-1]:.5f}, max |<y>| = "
               f"{np.max(np.abs(result.bloch[:, 1])):.4f}")


@cli.command()
@_common_options
@click.option("--scheme", default=None,
              type=click.Choice(["superadiabatic", "dynamical"]))
@click.option("--span", type=float, default=None,
              help="Half-width of the relative perturbation range.")
@click.option("--points", type=int, default=None, help="Points per axis.")
@click.option("--omega-xc-mhz", type=float, default=None,
              help="Center effective coupling (MHz); default 0.36 g.")
@click.option("--t-c", default=None, help="Center duration.")
@click.option("--decoherence/--ideal", "decoherence", default=None)
def robustness(config_path, **flags):
    """Transfer fidelity over an (amplitude, duration) perturbation grid."""
    defaults = _base_defaults("swap-point") | {
        "scheme": "superadiabatic", "span": 0.1, "points": 21,
        "omega_xc_mhz": None, "t_c": "110ns", "decoherence": False}
    cfg = resolve_config(config_path, flags, defaults, ("dt", "t_c"))
    if not 0.0 < cfg["span"] < 1.0:
        raise ConfigError("span must be in (0, 1)")
    if cfg["points"] < 2:
        raise ConfigError("points must be >= 2")
    dev = _load_device(cfg)
    axis = np.linspace(1.0 - cfg["span"], 1.0 + cfg["span"], cfg["points"])
    omega_xc = (None if cfg["omega_xc_mhz"] is None
                else cfg["omega_xc_mhz"] * _MHZ)
    grid = robustness_scan(cfg["scheme"], axis, axis, dev,
                           omega_xc=omega_xc, t_c=cfg["t_c"],
                           decoherence=cfg["decoherence"], dt=cfg["dt"])
    rows = [(lam, mu, grid.fidelity[i, j])
            for i, lam in enumerate(grid.omega_axis)
            for j, mu in enumerate(grid.time_axis)]
    worst = float(np.nanmin(grid.fidelity))
    _emit("robustness", cfg, ["omega_scale", "time_scale", "p10"], rows,
          {"worst_case_p10": worst,
           "omega_xc_mhz": grid.omega_xc / _MHZ,
           "invalid_cells": int(np.isnan(grid.fidelity).sum())},
          lambda p: report.plot_robustness(p, grid))
    click.echo(f"robustness: {cfg['scheme']}, worst-case P(|10>) = "
               f"{worst:.4f} over ±{100 * cfg['span']:.0f}% grid")


@cli.command()
@_common_options
@click.option("--T-half", "t_half", default=None,
              help="Duration of each transfer segment.")
@click.option("--decoherence/--ideal", "decoherence", default=None)
@click.option("--no-calibrate", "skip_calibration", is_flag=True,
              default=None, help="Run the nominal schedule without trims.")
def cz(config_path, **flags):
    """Round-trip conditional-phase gate: calibrate, run, score."""
    defaults = _base_defaults("cz-point") | {
        "t_half": "60ns", "decoherence": False, "skip_calibration": False}
    cfg = resolve_config(config_path, flags, defaults, ("dt", "t_half"))
    dev = _load_device(cfg)
    from .experiments import CZTrims
    trims = CZTrims() if cfg["skip_calibration"] else None
    result = cz_gate(dev, segment_duration=cfg["t_half"], trims=trims,
                     decoherence=cfg["decoherence"], dt=cfg["dt"])
    labels = list(result.populations)
    rows = zip(result.times * 1e9, *(result.populations[k] for k in labels))
    _emit("cz", cfg, ["t_ns"] + [f"p{k}" for k in labels], rows,
          {"conditional_phase_rad": result.conditional_phase,
           "average_gate_fidelity": result.fidelity.average_gate_fidelity,
           "process_fidelity": result.fidelity.process_fidelity,
           "leakage": result.fidelity.leakage,
           "trims": {"detuning_mhz": result.trims.detuning / _MHZ,
                     "detuning_split_mhz": result.trims.detuning_split / _MHZ,
                     "amplitude_split": result.trims.amplitude_split}},
          lambda p: report.plot_cz(p, result))
    click.echo(f"cz: fidelity = {result.fidelity.average_gate_fidelity:.5f}, "
               f"conditional phase = {result.conditional_phase:.4f} rad, "
               f"leakage = {result.fidelity.leakage:.2e}")


@cli.command()
@_common_options
@click.option("--T-half", "t_half", default=None,
              help="Duration of each transfer segment.")
@click.option("--n-phases", type=int, default=None,
              help="Number of analysis-pulse phases.")
def ramsey(config_path, **flags):
    """Conditional phase from target-qubit Ramsey fringes."""
    defaults = _base_defaults("cz-point") | {"t_half": "60ns", "n_phases": 25}
    cfg = resolve_config(config_path, flags, defaults, ("dt", "t_half"))
    if cfg["n_phases"] < 5:
        raise ConfigError("n_phases must be >= 5")
    dev = _load_device(cfg)
    result = ramsey_conditional_phase(dev, segment_duration=cfg["t_half"],
                                      n_phases=cfg["n_phases"], dt=cfg["dt"])
    rows = zip(result.phases, result.fringes[0], result.fringes[1])
    _emit("ramsey", cfg, ["phase_rad", "p1_control0", "p1_control1"], rows,
          {"conditional_phase_rad": result.conditional_phase,
           "fits": {"control0": list(result.fits[0]),
                    "control1": list(result.fits[1])},
           "max_residual": result.residual},
          lambda p: report.plot_ramsey(p, result))
    click.echo(f"ramsey: conditional phase = "
               f"{result.conditional_phase:.4f} rad")


def _build_model(cfg: dict, dev):
    name = cfg["model"]
    if name == "ideal":
        return IdealModel()
    if name == "depolarizing":
        return DepolarizingModel(cfg["p0"], cfg["p0_interleaved"])
    return LindbladModel(dev, segment_duration=cfg["t_half"],
                         single_qubit_idle=cfg["idle"], dt=cfg["dt"])


@cli.command()
@_common_options
@click.option("--variant", default=None,
              type=click.Choice(["reference", "interleaved-cz",
                                 "interleaved-idle"]))
@click.option("--lengths", default=None,
              help="Comma-separated sequence lengths, e.g. '1,5,10,20,40'.")
@click.option("--k", type=int, default=None,
              help="Randomizations per length.")
@click.option("--seed", type=int, default=None, help="PRNG seed (required).")
@click.option("--model", default=None,
              type=click.Choice(["lindblad", "depolarizing", "ideal"]))
@click.option("--p0", type=float, default=None,
              help="Depolarizing parameter per Clifford.")
@click.option("--p0-interleaved", type=float, default=None,
              help="Depolarizing parameter of the interleaved element.")
@click.option("--T-half", "t_half", default=None,
              help="Segment duration for the Lindblad gate model.")
@click.option("--idle", default=None,
              help="Idle window after each single-qubit layer.")
def rb(config_path, **flags):
    """Interleaved randomized benchmarking."""
    defaults = _base_defaults("cz-point") | {
        "variant": "interleaved-cz", "lengths": "1,3,5,8,12,16,22,30,40",
        "k": 60, "seed": None, "model": "lindblad", "p0": 0.98,
        "p0_interleaved": None, "t_half": "60ns", "idle": "30ns"}
    cfg = resolve_config(config_path, flags, defaults,
                         ("dt", "t_half", "idle"))
    if cfg["seed"] is None:
        raise ConfigError("seed required for stochastic experiment")
    try:
        lengths = [int(m) for m in str(cfg["lengths"]).split(",")]
    except ValueError:
        raise ConfigError(
            f"lengths: cannot parse {cfg['lengths']!r} as integers") from None
    if any(m < 1 for m in lengths):
        raise ConfigError("sequence lengths must be >= 1")
    dev = _load_device(cfg)
    model = _build_model(cfg, dev)
    results = [run_rb(cfg["variant"], lengths, k=cfg["k"], seed=cfg["seed"],
                      model=model)]
    metadata = {"variant": cfg["variant"],
                "fit": {cfg["variant"]: vars(results[0].fit)}}
    if cfg["variant"] != "reference":
        reference = run_rb("reference", lengths, k=cfg["k"],
                           seed=cfg["seed"], model=model)
        results.append(reference)
        metadata["fit"]["reference"] = vars(reference.fit)
        if not (results[0].fit.degenerate or reference.fit.degenerate):
            r = interleaved_error_rate(results[0].fit.p, reference.fit.p)
            results[0].error_rate = metadata["error_rate"] = r
    rows = [(res.variant, m, mean, err) for res in results
            for m, mean, err in zip(res.lengths, res.survival, res.std_err)]
    _emit("rb", cfg, ["variant", "m", "survival", "std_err"], rows, metadata,
          lambda p: report.plot_rb(p, results))
    summary = f"rb: {cfg['variant']} fitted p = {results[0].fit.p:.5f}"
    if results[0].error_rate is not None:
        summary += (f", reference p = {results[-1].fit.p:.5f}, "
                    f"r = {100 * results[0].error_rate:.2f}%")
    click.echo(summary)


@cli.command()
@_common_options
@click.option("--target", default=None, type=click.Choice(["swap", "cz"]),
              help="Which gate's flux waveform to synthesize.")
@click.option("--T", "t_gate", default=None,
              help="Transfer duration (per segment for cz).")
@click.option("--omega0-mhz", type=float, default=None,
              help="Peak Rabi rate override (MHz).")
def synth(config_path, **flags):
    """Emit the synthesized flux waveform as CSV."""
    defaults = _base_defaults("swap-point") | {
        "target": "swap", "t_gate": None, "omega0_mhz": None}
    cfg = resolve_config(config_path, flags, defaults, ("dt",))
    if cfg["target"] == "cz" and cfg["preset"] == "swap-point" \
            and flags.get("preset") is None:
        cfg["preset"] = "cz-point"
    if cfg["t_gate"] is None:
        cfg["t_gate"] = "80ns" if cfg["target"] == "swap" else "60ns"
    cfg["t_gate"] = parse_duration(cfg["t_gate"], "t_gate")
    dev = _load_device(cfg)
    coupling = dev.g if cfg["target"] == "swap" else math.sqrt(2.0) * dev.g
    carrier = dev.swap_carrier if cfg["target"] == "swap" else dev.cz_carrier
    omega0 = (default_swap_amplitude(coupling, cfg["t_gate"])
              if cfg["omega0_mhz"] is None else cfg["omega0_mhz"] * _MHZ)
    sched = superadiabatic_schedule(
        base_schedule(cfg["t_gate"], omega0, cfg["dt"]))
    if cfg["target"] == "cz":
        sched = repeat_schedule(sched, 2)
    wf = waveform(modulation_params(sched, coupling, carrier), dev)
    rows = zip(wf.times * 1e9, wf.f_samples, wf.f_dot, wf.eps)
    _emit("synth", cfg, ["t_ns", "F_rad", "Fdot_rad_per_s", "eps"], rows,
          {"samples": len(wf.times),
           "peak_eps": float(np.max(np.abs(wf.eps))),
           "omega0_mhz": omega0 / _MHZ},
          lambda p: report.plot_waveform(p, wf))
    click.echo(f"synth: {cfg['target']} waveform, {len(wf.times)} samples, "
               f"peak |eps| = {np.max(np.abs(wf.eps)):.4f}")


def main(argv=None) -> int:
    """Dispatch with the documented exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except ConfigError as exc:
        exc.show()
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        return 1
    except NUMERICAL_ERRORS as exc:
        click.echo(f"numerical error: {exc}", err=True)
        return 2
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
