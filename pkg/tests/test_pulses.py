import math

import numpy as np
import pytest
from scipy.special import j1 as bessel_j1

from paragate import operators as ops
from paragate.device import flux_response, load_preset
from paragate.dynamics import build_lab_hamiltonian, propagate_unitary
from paragate.pulses import (BESSEL_PEAK_ARG, BESSEL_PEAK_VALUE, BETA_SIGN,
                             BesselCeilingError, DELTA_SIGN, base_schedule,
                             constant_schedule, default_swap_amplitude,
                             invert_bessel_j1, modulation_params,
                             repeat_schedule, superadiabatic_schedule,
                             uncorrected_schedule, waveform)


def test_base_schedule_shape():
    sched = base_schedule(80e-9, 1.0e7, 0.1e-9)
    assert sched.omega_r[0] == pytest.approx(0.0, abs=1e-3)
    assert sched.delta[0] == pytest.approx(1.0e7)
    assert sched.delta[-1] == pytest.approx(-1.0e7)
    assert sched.times[-1] == pytest.approx(80e-9)
    with pytest.raises(ValueError):
        base_schedule(-1e-9, 1.0e7, 0.1e-9)


def test_superadiabatic_schedule_identities():
    base = base_schedule(80e-9, 1.0e7, 0.1e-9)
    sa = superadiabatic_schedule(base)
    theta_dot = math.pi / 80e-9
    assert np.allclose(sa.theta_dot, theta_dot)
    assert np.allclose(sa.omega_s, np.hypot(base.omega_r, theta_dot))
    # Mixing angle runs 0 -> pi.
    assert sa.theta[0] == pytest.approx(0.0, abs=1e-6)
    assert sa.theta[-1] == pytest.approx(math.pi, abs=1e-6)
    # Drive tilt is pi/2 at the endpoints where Omega_R vanishes.
    assert sa.phi_s[0] == pytest.approx(math.pi / 2.0, abs=1e-3)


def test_uncorrected_schedule_is_bare_drive():
    base = base_schedule(80e-9, 1.0e7, 0.1e-9)
    plain = uncorrected_schedule(base)
    assert np.allclose(plain.omega_s, base.omega_r)
    assert np.allclose(plain.phi_s, 0.0)


def test_constant_schedule():
    sched = constant_schedule(100e-9, 2.0e7, 0.1e-9)
    assert np.allclose(sched.omega_r, 2.0e7)
    assert np.allclose(sched.delta, 0.0)
    assert not sched.sine_cosine_family


def test_repeat_schedule_tiles():
    sa = superadiabatic_schedule(base_schedule(60e-9, 1.0e7, 0.1e-9))
    rep = repeat_schedule(sa, 2)
    n = len(sa.times) - 1
    assert len(rep.times) == 2 * n + 1
    assert rep.duration == pytest.approx(2 * sa.duration)
    assert np.allclose(rep.omega_s[:n], rep.omega_s[n:-1])
    # The detuning re-enters at its initial value at the segment boundary.
    assert rep.delta[n] == pytest.approx(sa.delta[0])


def test_invert_bessel_j1_roundtrip():
    xs = np.linspace(0.0, BESSEL_PEAK_VALUE, 50)
    for x in xs:
        a = invert_bessel_j1(float(x))
        assert bessel_j1(a) == pytest.approx(float(x), abs=1e-12)
    # Small-argument power series: J1(a) ~ a/2, so invert(x) ~ 2x.
    assert invert_bessel_j1(1e-4) == pytest.approx(2e-4, rel=1e-6)
    assert invert_bessel_j1(BESSEL_PEAK_VALUE) == pytest.approx(
        BESSEL_PEAK_ARG)
    with pytest.raises(BesselCeilingError):
        invert_bessel_j1(BESSEL_PEAK_VALUE + 1e-6)
    with pytest.raises(BesselCeilingError):
        invert_bessel_j1(-0.1)


def test_default_swap_amplitude_hits_margin():
    g, duration, margin = 2.0 * math.pi * 6.26e6, 80e-9, 0.9
    omega0 = default_swap_amplitude(g, duration, margin)
    ceiling = 2.0 * g * BESSEL_PEAK_VALUE
    theta_dot = math.pi / duration
    assert omega0 == pytest.approx(
        margin * math.sqrt(ceiling**2 - theta_dot**2))
    assert math.hypot(omega0, theta_dot) < ceiling
    with pytest.raises(BesselCeilingError):
        default_swap_amplitude(g, 1e-10)


def test_modulation_params_identities():
    dev = load_preset("swap-point")
    sa = superadiabatic_schedule(
        base_schedule(80e-9, default_swap_amplitude(dev.g, 80e-9), 0.1e-9))
    mod = modulation_params(sa, dev.g, dev.swap_carrier)
    # Bessel inversion: 2 g J1(A(t)) = Omega_S(t).
    assert np.max(np.abs(2.0 * dev.g * bessel_j1(mod.amplitude)
                         - sa.omega_s)) < 1e-3 * sa.omega_s.max()
    # delta_l integrates the detuning with the frozen sign.
    assert np.allclose(mod.delta_l_dot, DELTA_SIGN * sa.delta)
    assert mod.delta_l[0] == 0.0
    assert np.allclose(np.gradient(mod.delta_l, mod.dt)[2:-2],
                       (DELTA_SIGN * sa.delta)[2:-2], rtol=1e-3, atol=10.0)
    assert np.allclose(mod.beta_l, BETA_SIGN * (sa.phi + sa.phi_s))


def test_modulation_params_ceiling():
    dev = load_preset("swap-point")
    sched = uncorrected_schedule(
        constant_schedule(80e-9, 3.0 * dev.g, 0.1e-9))
    with pytest.raises(BesselCeilingError):
        modulation_params(sched, dev.g, dev.swap_carrier)


def test_waveform_consistency():
    dev = load_preset("swap-point")
    sa = superadiabatic_schedule(
        base_schedule(80e-9, default_swap_amplitude(dev.g, 80e-9), 0.1e-9))
    mod = modulation_params(sa, dev.g, dev.swap_carrier)
    wf = waveform(mod, dev)
    # F(t) = A sin(carrier t + delta_l + beta_l).
    phase = mod.carrier * mod.times + mod.delta_l + mod.beta_l
    assert np.allclose(wf.f_samples, mod.amplitude * np.sin(phase))
    # F-dot agrees with the finite difference of F away from the edges
    # (central-difference truncation ~ (carrier*dt)^2/6 ~ 3e-3 here).
    fd = np.gradient(wf.f_samples, wf.dt)
    scale = np.max(np.abs(wf.f_dot))
    assert np.max(np.abs((fd - wf.f_dot)[5:-5])) < 5e-3 * scale
    # eps solves the flux response for F-dot.
    assert np.max(np.abs(flux_response(wf.eps, dev) - wf.f_dot)) < 1e-6 * scale
    with pytest.raises(ValueError):
        waveform(mod, dev, dt=0.2e-9)


def test_sign_conventions_frozen():
    assert DELTA_SIGN == +1.0
    assert BETA_SIGN == -1.0


def test_synthesized_waveform_transfers_in_lab_frame():
    """Regression pinning the frame sign conventions: the synthesized flux
    drive must realize the |01> -> |10> transfer in the lab frame."""
    dev = load_preset("swap-point")
    duration, dt = 80e-9, 0.1e-9
    sa = superadiabatic_schedule(
        base_schedule(duration, default_swap_amplitude(dev.g, duration), dt))
    wf = waveform(modulation_params(sa, dev.g, dev.swap_carrier), dev)
    h = build_lab_hamiltonian(dev, wf)
    psi0 = ops.basis_state(dev.dims, [0, 1])
    res = propagate_unitary(h, duration, dt, psi0=psi0, stride=10**9)
    i10 = ops.basis_index(dev.dims, [1, 0])
    assert abs(res.final_state[i10]) ** 2 > 0.99
