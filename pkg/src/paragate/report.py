"""Artifact writers: figure-ready CSV, JSON metadata, and PNG figures.

Every experiment emits a triple `<experiment>_<preset>_<timestamp>.csv`
(data), `.json` (resolved configuration and fitted quantities) and `.png`
(a rendered figure of the same data).  CSV numbers are written with 12
significant digits so identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
import time
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402


def artifact_paths(output_dir, experiment: str, preset: str,
                   timestamp: str | None = None) -> dict[str, Path]:
    """Build the csv/json/png path triple, creating the directory."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    if timestamp is None:
        timestamp = time.strftime("%Y%m%dT%H%M%S")
    stem = f"{experiment}_{preset}_{timestamp}"
    return {kind: out / f"{stem}.{kind}" for kind in ("csv", "json", "png")}


def _format(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return f"{float(value):.12g}"


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    lines += [",".join(_format(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def _jsonable(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(_jsonable(payload), indent=2,
                                     sort_keys=True) + "\n")


def _finish(fig, ax, path, xlabel, ylabel, title):
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_calibration(path, result, dev) -> None:
    from scipy.special import j1 as bessel_j1
    fig, ax = plt.subplots()
    mhz = 2.0 * np.pi * 1e6
    ax.plot(result.amplitudes, result.g_eff / mhz, "o", label="simulated")
    grid = np.linspace(0.0, result.amplitudes.max(), 200)
    ax.plot(grid, result.fitted_g * bessel_j1(grid) / mhz, "-",
            label="$g\\,J_1(A)$ fit")
    ax.legend()
    _finish(fig, ax, path, "modulation amplitude A",
            "effective coupling (MHz)",
            f"$T_{{QL}}$ = {result.t_ql * 1e9:.1f} ns")


def plot_trajectory(path, result) -> None:
    fig, ax = plt.subplots()
    t = result.times * 1e9
    for i, label in enumerate(["$\\langle x\\rangle$", "$\\langle y\\rangle$",
                               "$\\langle z\\rangle$"]):
        ax.plot(t, result.bloch[:, i], label=label)
    ax.legend()
    _finish(fig, ax, path, "time (ns)", "Bloch component",
            f"{result.scheme} transfer")


def plot_robustness(path, grid) -> None:
    fig, ax = plt.subplots()
    mesh = ax.pcolormesh(grid.time_axis, grid.omega_axis, grid.fidelity,
                         vmin=np.nanmin(grid.fidelity), vmax=1.0,
                         shading="nearest")
    fig.colorbar(mesh, ax=ax, label="$P(|10\\rangle)$")
    _finish(fig, ax, path, "$T/T_c$", "$\\Omega_x/\\Omega_{xc}$",
            f"{grid.scheme} robustness")


def plot_cz(path, result) -> None:
    fig, ax = plt.subplots()
    t = result.times * 1e9
    for label, pop in result.populations.items():
        ax.plot(t, pop, label=f"$|{label}\\rangle$")
    ax.legend(ncol=2)
    _finish(fig, ax, path, "time (ns)", "population",
            f"conditional phase = {result.conditional_phase:.4f} rad")


def plot_ramsey(path, result) -> None:
    fig, ax = plt.subplots()
    grid = np.linspace(0.0, 2.0 * np.pi, 200)
    for c, style in ((0, "C0"), (1, "C3")):
        a1, a2, b = result.fits[c]
        ax.plot(result.phases, result.fringes[c], "o", color=style,
                label=f"control $|{c}\\rangle$")
        ax.plot(grid, a1 * np.cos(grid) + a2 * np.sin(grid) + b, "-",
                color=style, alpha=0.6)
    ax.legend()
    _finish(fig, ax, path, "analysis phase (rad)", "target $P(|1\\rangle)$",
            f"conditional phase = {result.conditional_phase:.4f} rad")


def plot_rb(path, results) -> None:
    """One or more RBResult curves with their exponential fits."""
    fig, ax = plt.subplots()
    for res in results:
        line = ax.errorbar(res.lengths, res.survival, yerr=res.std_err,
                           fmt="o", label=res.variant)
        if not res.fit.degenerate:
            grid = np.linspace(res.lengths[0], res.lengths[-1], 200)
            ax.plot(grid, res.fit.a * res.fit.p**grid + res.fit.b, "-",
                    color=line[0].get_color(), alpha=0.6)
    ax.legend()
    _finish(fig, ax, path, "number of Cliffords m",
            "$P(|00\\rangle)$", "randomized benchmarking")


def plot_waveform(path, wf) -> None:
    fig, axes = plt.subplots(2, 1, sharex=True)
    t = wf.times * 1e9
    axes[0].plot(t, wf.f_samples)
    axes[0].set_ylabel("F(t) (rad)")
    axes[1].plot(t, wf.eps)
    axes[1].set_ylabel("flux $\\epsilon(t)$")
    axes[1].set_xlabel("time (ns)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
