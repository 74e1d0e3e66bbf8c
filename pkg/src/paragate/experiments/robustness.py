"""Transfer-fidelity robustness scan over amplitude and duration errors.

Grid semantics: the schedule shape is rebuilt for the perturbed duration
(the instrument knows the programmed gate time), while the amplitude
perturbation multiplies the executed transverse drive as an uncompensated
control error.  The dynamical scheme is a rectangular resonant drive whose
center point realizes a pi transfer area.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import operators as ops
from ..device import DeviceParams, collapse_operators
from ..dynamics import (build_effective_hamiltonian, propagate_lindblad,
                        propagate_unitary)
from ..pulses import (BESSEL_PEAK_VALUE, base_schedule, constant_schedule,
                      superadiabatic_schedule, uncorrected_schedule)
from .trajectory import embed_effective_hamiltonian

SCAN_SCHEMES = ("superadiabatic", "dynamical")


@dataclass
class RobustnessGrid:
    omega_axis: np.ndarray    # Omega_x / Omega_xc values
    time_axis: np.ndarray     # T / T_c values
    fidelity: np.ndarray      # (len(omega_axis), len(time_axis)) P(|10>)
    scheme: str
    decoherence: bool
    omega_xc: float           # center effective coupling (rad/s)
    t_c: float                # center duration (s)

    def diagonal(self) -> np.ndarray:
        """Cross section along equal relative perturbations."""
        if len(self.omega_axis) != len(self.time_axis):
            raise ValueError("diagonal requires a square grid")
        return np.diagonal(self.fidelity).copy()


def _transfer_population(sched, amplitude_scale, dev, decoherence, dt):
    h2 = build_effective_hamiltonian(sched, amplitude_scale=amplitude_scale)
    duration = sched.duration
    if not decoherence:
        res = propagate_unitary(h2, duration, dt,
                                psi0=np.array([1.0, 0.0], dtype=complex),
                                stride=10 ** 9)
        return float(np.abs(res.final_state[1]) ** 2)
    h_full = embed_effective_hamiltonian(h2, dev)
    rho0 = ops.density_from_state(ops.basis_state(dev.dims, [0, 1]))
    res = propagate_lindblad(h_full, collapse_operators(dev), rho0,
                             duration, dt, stride=10 ** 9)
    down = ops.basis_index(dev.dims, [1, 0])
    return float(res.final_density[down, down].real)


def robustness_scan(scheme: str, omega_axis, time_axis, dev: DeviceParams,
                    omega_xc: float | None = None, t_c: float = 110e-9,
                    decoherence: bool = False,
                    dt: float = 0.1e-9) -> RobustnessGrid:
    """Final |01> -> |10> population over the (amplitude, duration) grid.

    omega_xc is the center effective coupling; the center Rabi rate is
    2 * omega_xc.  Grid cells whose executed drive would exceed the Bessel
    coupling ceiling are marked NaN and skipped.
    """
    if scheme not in SCAN_SCHEMES:
        raise ValueError(
            f"unknown scheme {scheme!r}; expected one of {SCAN_SCHEMES}")
    omega_axis = np.asarray(omega_axis, dtype=float)
    time_axis = np.asarray(time_axis, dtype=float)
    if np.any(np.diff(omega_axis) <= 0) or np.any(np.diff(time_axis) <= 0):
        raise ValueError("grid axes must be strictly increasing")
    if omega_xc is None:
        omega_xc = 0.36 * dev.g
    ceiling = 2.0 * dev.g * BESSEL_PEAK_VALUE
    fidelity = np.full((len(omega_axis), len(time_axis)), np.nan)
    for j, mu in enumerate(time_axis):
        duration = mu * t_c
        if scheme == "superadiabatic":
            sched = superadiabatic_schedule(
                base_schedule(duration, 2.0 * omega_xc, dt))
        else:
            sched = uncorrected_schedule(
                constant_schedule(duration, 2.0 * omega_xc, dt))
        peak = sched.omega_s.max()
        for i, lam in enumerate(omega_axis):
            if lam * peak > ceiling:
                continue  # cell invalid: exceeds the coupling ceiling
            fidelity[i, j] = _transfer_population(sched, lam, dev,
                                                  decoherence, dt)
    return RobustnessGrid(omega_axis=omega_axis, time_axis=time_axis,
                          fidelity=fidelity, scheme=scheme,
                          decoherence=decoherence, omega_xc=omega_xc, t_c=t_c)
