"""Control-schedule synthesis for superadiabatic parametric gates.

Pipeline: sine/cosine base schedule -> superadiabatic correction
(theta-dot term folded into an enlarged drive with a phase tilt) ->
parametric-modulation parameters (Bessel-inverted amplitude, integrated
detuning phase, drive phase) -> physical flux waveform eps(t).

Sign conventions binding the drive phase and the detuning integral to the
longitudinal-modulation frame are frozen in DELTA_SIGN / BETA_SIGN below;
they are pinned by a regression test that propagates the synthesized
waveform in the lab frame and checks the |01> -> |10> transfer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import j1 as bessel_j1

from .device import DeviceParams, FluxInversionError, invert_flux_response

# First maximum of J1 and its value: the usable rising branch is
# A in [0, BESSEL_PEAK_ARG], where J1 is monotone.
BESSEL_PEAK_ARG = 1.8411837813406593
BESSEL_PEAK_VALUE = float(bessel_j1(BESSEL_PEAK_ARG))

# Frame conventions validated by the lab-frame cross-check (see module
# docstring): delta_l integrates +Delta, beta_l carries -(phi + phi_s).
# The mirrored pair (-, +) realizes the same effective Hamiltonian with a
# slightly larger higher-harmonic residual; the other two sign pairs fail
# the transfer check outright.
DELTA_SIGN = +1.0
BETA_SIGN = -1.0


class BesselCeilingError(ValueError):
    """Requested effective coupling exceeds the J1 ceiling."""


def _time_grid(duration: float, dt: float) -> np.ndarray:
    steps = int(math.floor(duration / dt + 1e-9))
    return np.arange(steps + 1) * dt


@dataclass(frozen=True)
class BaseSchedule:
    """Sampled (Omega_R, Delta) trajectory of the bare two-level drive."""

    times: np.ndarray
    omega_r: np.ndarray
    delta: np.ndarray
    phi: float
    duration: float
    dt: float
    sine_cosine_family: bool = False  # Omega_R ~ sin, Delta ~ cos: theta-dot is constant


@dataclass(frozen=True)
class SuperadiabaticSchedule:
    """Counterdiabatic-corrected drive: Omega_S, phi_S, and the mixing angle."""

    times: np.ndarray
    theta: np.ndarray
    theta_dot: np.ndarray
    omega_s: np.ndarray
    phi_s: np.ndarray
    delta: np.ndarray
    phi: float
    duration: float
    dt: float


@dataclass(frozen=True)
class ModulationParams:
    """Sampled modulation amplitude/phase parameters and carrier (rad/s)."""

    times: np.ndarray
    amplitude: np.ndarray
    delta_l: np.ndarray
    delta_l_dot: np.ndarray
    beta_l: np.ndarray
    carrier: float
    dt: float


@dataclass(frozen=True)
class Waveform:
    """Physical flux drive: F(t), its derivative, and the flux samples."""

    times: np.ndarray
    f_samples: np.ndarray
    f_dot: np.ndarray
    eps: np.ndarray
    dt: float


def base_schedule(duration: float, omega0: float, dt: float,
                  phi: float = 0.0) -> BaseSchedule:
    """Sine/cosine schedule: Omega_R = W0 sin(pi t/T), Delta = W0 cos(pi t/T)."""
    if duration <= 0 or dt <= 0 or omega0 <= 0:
        raise ValueError("duration, dt and omega0 must be positive")
    t = _time_grid(duration, dt)
    phase = math.pi * t / duration
    return BaseSchedule(times=t, omega_r=omega0 * np.sin(phase),
                        delta=omega0 * np.cos(phase), phi=phi,
                        duration=duration, dt=dt, sine_cosine_family=True)


def constant_schedule(duration: float, omega_r: float, dt: float,
                      delta: float = 0.0, phi: float = 0.0) -> BaseSchedule:
    """Rectangular drive used by the dynamical (plain Rabi) scheme."""
    t = _time_grid(duration, dt)
    return BaseSchedule(times=t, omega_r=np.full_like(t, omega_r),
                        delta=np.full_like(t, delta), phi=phi,
                        duration=duration, dt=dt, sine_cosine_family=False)


def superadiabatic_schedule(base: BaseSchedule) -> SuperadiabaticSchedule:
    """Add the counterdiabatic term to a base schedule.

    theta = atan2(Omega_R, Delta) unwrapped to run continuously; for the
    sine/cosine family theta-dot = pi/T exactly and is used analytically,
    otherwise centered differences are used.
    """
    theta = np.unwrap(np.arctan2(base.omega_r, base.delta))
    if base.sine_cosine_family:
        theta_dot = np.full_like(theta, math.pi / base.duration)
    else:
        theta_dot = np.gradient(theta, base.dt)
    omega_s = np.hypot(base.omega_r, theta_dot)
    phi_s = np.arctan2(theta_dot, base.omega_r)
    return SuperadiabaticSchedule(times=base.times, theta=theta,
                                  theta_dot=theta_dot, omega_s=omega_s,
                                  phi_s=phi_s, delta=base.delta, phi=base.phi,
                                  duration=base.duration, dt=base.dt)


def uncorrected_schedule(base: BaseSchedule) -> SuperadiabaticSchedule:
    """Wrap a base schedule without the counterdiabatic term (adiabatic or
    dynamical execution): Omega_S = Omega_R, phi_S = 0."""
    zeros = np.zeros_like(base.omega_r)
    theta = np.unwrap(np.arctan2(base.omega_r, base.delta))
    return SuperadiabaticSchedule(times=base.times, theta=theta,
                                  theta_dot=zeros, omega_s=base.omega_r,
                                  phi_s=zeros, delta=base.delta, phi=base.phi,
                                  duration=base.duration, dt=base.dt)


def repeat_schedule(sched: SuperadiabaticSchedule,
                    reps: int = 2) -> SuperadiabaticSchedule:
    """Tile a schedule back-to-back (each repetition restarts at theta = 0).

    Used for the round-trip CZ sequence: two identical transfer segments.
    The sign flip of the re-entered detuning swaps the adiabatic branch, so
    the second segment brings the population back.
    """
    n = len(sched.times) - 1

    def tile(arr):
        return np.concatenate([arr[:-1]] * (reps - 1) + [arr])

    times = np.arange(reps * n + 1) * sched.dt
    return SuperadiabaticSchedule(
        times=times, theta=tile(sched.theta), theta_dot=tile(sched.theta_dot),
        omega_s=tile(sched.omega_s), phi_s=tile(sched.phi_s),
        delta=tile(sched.delta), phi=sched.phi,
        duration=reps * sched.duration, dt=sched.dt)


def invert_bessel_j1(x: float) -> float:
    """Invert J1 on its monotone rising branch [0, first peak]."""
    if not 0.0 <= x <= BESSEL_PEAK_VALUE:
        raise BesselCeilingError(
            f"requested coupling exceeds Bessel ceiling: J1 amplitude {x:.6f} "
            f"outside [0, {BESSEL_PEAK_VALUE:.6f}]")
    if x == 0.0:
        return 0.0
    if x == BESSEL_PEAK_VALUE:
        return BESSEL_PEAK_ARG
    return brentq(lambda a: bessel_j1(a) - x, 0.0, BESSEL_PEAK_ARG,
                  xtol=1e-13, rtol=8.9e-16)


def default_swap_amplitude(g: float, duration: float,
                           margin: float = 0.9) -> float:
    """Peak Rabi rate putting max Omega_S at `margin` of the J1 ceiling."""
    ceiling = 2.0 * g * BESSEL_PEAK_VALUE
    theta_dot = math.pi / duration
    if ceiling <= theta_dot:
        raise BesselCeilingError(
            f"duration {duration} too short: counterdiabatic rate alone "
            f"exceeds the coupling ceiling")
    return margin * math.sqrt(ceiling**2 - theta_dot**2)


def modulation_params(sched: SuperadiabaticSchedule, g: float,
                      carrier: float) -> ModulationParams:
    """Map a drive schedule onto modulation parameters (A, delta_l, beta_l).

    A(t) solves 2 g J1(A) = Omega_S(t); delta_l integrates the detuning
    (trapezoidal, delta_l(0) = 0); beta_l carries the drive phase.
    """
    ratio = sched.omega_s / (2.0 * g)
    if ratio.max() > BESSEL_PEAK_VALUE * (1.0 + 1e-12):
        raise BesselCeilingError(
            f"requested coupling exceeds Bessel ceiling: peak Omega_S/(2g) = "
            f"{ratio.max():.6f} > J1 max {BESSEL_PEAK_VALUE:.6f}")
    amplitude = np.array([invert_bessel_j1(min(r, BESSEL_PEAK_VALUE))
                          for r in ratio])
    delta_l_dot = DELTA_SIGN * sched.delta
    delta_l = np.concatenate(
        [[0.0], np.cumsum((delta_l_dot[1:] + delta_l_dot[:-1]) * 0.5 * sched.dt)])
    beta_l = BETA_SIGN * (sched.phi + sched.phi_s)
    return ModulationParams(times=sched.times, amplitude=amplitude,
                            delta_l=delta_l, delta_l_dot=delta_l_dot,
                            beta_l=beta_l, carrier=carrier, dt=sched.dt)


def waveform(mod: ModulationParams, dev: DeviceParams,
             dt: float | None = None) -> Waveform:
    """Synthesize F(t) = A sin(carrier*t + delta_l + beta_l) and eps(t).

    F-dot is assembled analytically from the sampled envelope derivatives,
    then pushed through the inverse flux response sample by sample.
    """
    if dt is not None and not math.isclose(dt, mod.dt, rel_tol=1e-9):
        raise ValueError("waveform dt must match the modulation sample grid")
    t = mod.times
    phase = mod.carrier * t + mod.delta_l + mod.beta_l
    f_samples = mod.amplitude * np.sin(phase)
    a_dot = np.gradient(mod.amplitude, mod.dt)
    beta_dot = np.gradient(mod.beta_l, mod.dt)
    f_dot = (a_dot * np.sin(phase)
             + mod.amplitude * (mod.carrier + mod.delta_l_dot + beta_dot)
             * np.cos(phase))
    try:
        eps = invert_flux_response(f_dot, dev)
    except FluxInversionError:
        # Re-run sample by sample to name the offending index.
        for i, df in enumerate(f_dot):
            try:
                invert_flux_response(float(df), dev)
            except FluxInversionError as exc:
                raise FluxInversionError(
                    f"flux inversion failed at sample {i} "
                    f"(t = {t[i] * 1e9:.3f} ns): {exc}") from exc
        raise
    return Waveform(times=t, f_samples=f_samples, f_dot=f_dot, eps=eps,
                    dt=mod.dt)
