import math

import numpy as np
import pytest

from paragate import operators as ops
from paragate.device import (DeviceParams, collapse_operators, flux_response,
                             invert_flux_response, load_preset,
                             params_from_dict)
from paragate.dynamics import (TimeDependentHamiltonian, constant_coefficient,
                               propagate_lindblad)

TWO_PI = 2.0 * math.pi


def test_load_preset_units():
    dev = load_preset("swap-point")
    assert dev.omega1 == pytest.approx(TWO_PI * 6.1567e9)
    assert dev.omega2 == pytest.approx(TWO_PI * 5.9498e9)
    assert dev.eta1 == pytest.approx(-TWO_PI * 299.2e6)
    assert dev.g == pytest.approx(TWO_PI * 6.26e6)
    assert dev.t1_q1 == pytest.approx(4.06e-6)
    assert dev.levels == 2
    assert load_preset("cz-point").levels == 3


def test_load_preset_unknown_name():
    with pytest.raises(ValueError, match="available"):
        load_preset("no-such-point")


def test_params_from_dict_rejects_unknown_keys():
    with pytest.raises(ValueError, match="unknown device keys"):
        params_from_dict({"omega1_ghz": 6.0, "omega2_ghz": 5.9,
                          "g_mhz": 6.0, "bogus": 1})


def test_device_validation():
    kwargs = dict(omega1=1.0, omega2=2.0, eta1=0.0, eta2=0.0, g=1.0,
                  flux_coeffs=(1.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        DeviceParams(**{**kwargs, "omega2": 1.0})
    with pytest.raises(ValueError):
        DeviceParams(**{**kwargs, "g": 0.0})
    with pytest.raises(ValueError):
        DeviceParams(**{**kwargs, "levels": 4})
    with pytest.raises(ValueError):
        DeviceParams(**{**kwargs, "t1_q1": -1.0})
    with pytest.raises(ValueError):
        DeviceParams(**{**kwargs, "flux_coeffs": (0.0, 1.0, 0.0)})


def test_carriers():
    dev = load_preset("cz-point")
    assert dev.swap_carrier == pytest.approx(dev.omega2 - dev.omega1)
    assert dev.cz_carrier == pytest.approx(dev.omega2 - dev.omega1 - dev.eta1)


def test_without_decoherence():
    dev = load_preset("swap-point").without_decoherence()
    assert collapse_operators(dev) == []


def test_flux_response_roundtrip():
    dev = load_preset("swap-point")
    eps = np.linspace(-0.4, 0.4, 41)
    df = flux_response(eps, dev)
    back = invert_flux_response(df, dev)
    assert np.max(np.abs(back - eps)) < 1e-8
    # Scalar path preserves type.
    assert isinstance(invert_flux_response(flux_response(0.2, dev), dev),
                      float)


def test_collapse_operator_rates():
    dev = DeviceParams(omega1=1.0, omega2=2.0, eta1=0.0, eta2=0.0, g=1.0,
                       flux_coeffs=(1.0, 0.0, 0.0), t1_q1=2e-6, tphi_q2=5e-6)
    cset = collapse_operators(dev)
    assert len(cset) == 2
    a1 = ops.embed(ops.lowering(2), 0, [2, 2])
    n2 = ops.embed(ops.number(2), 1, [2, 2])
    assert np.allclose(cset[0], math.sqrt(1.0 / 2e-6) * a1)
    assert np.allclose(cset[1], math.sqrt(2.0 / 5e-6) * n2)


def test_lindblad_analytic_decays():
    """H = 0 decoherence: population e^{-t/T1}, coherence at
    1/(2 T1) + 1/Tphi."""
    t1, tphi = 1.0e-6, 2.0e-6
    dev = DeviceParams(omega1=1.0, omega2=2.0, eta1=0.0, eta2=0.0, g=1.0,
                       flux_coeffs=(1.0, 0.0, 0.0), t1_q1=t1, tphi_q1=tphi)
    h = TimeDependentHamiltonian(
        terms=[(np.zeros((4, 4), dtype=complex), constant_coefficient(0.0))],
        dim=4)
    plus = (ops.basis_state([2, 2], [0, 0])
            + ops.basis_state([2, 2], [1, 0])) / math.sqrt(2.0)
    rho0 = ops.density_from_state(plus)
    duration = 0.5e-6
    res = propagate_lindblad(h, collapse_operators(dev), rho0, duration,
                             dt=1e-9, stride=10**9)
    rho = res.final_density
    i10 = ops.basis_index([2, 2], [1, 0])
    assert rho[i10, i10].real == pytest.approx(
        0.5 * math.exp(-duration / t1), abs=1e-6)
    expected_coh = 0.5 * math.exp(-duration * (0.5 / t1 + 1.0 / tphi))
    assert abs(rho[0, i10]) == pytest.approx(expected_coh, abs=1e-6)


def test_lindblad_pure_dephasing_level_two():
    """|2> coherences dephase four times faster than |1> (n-operator jump)."""
    tphi = 1.0e-6
    dev = DeviceParams(omega1=1.0, omega2=2.0, eta1=0.0, eta2=0.0, g=1.0,
                       flux_coeffs=(1.0, 0.0, 0.0), tphi_q1=tphi, levels=3)
    h = TimeDependentHamiltonian(
        terms=[(np.zeros((9, 9), dtype=complex), constant_coefficient(0.0))],
        dim=9)
    psi = (ops.basis_state([3, 3], [0, 0])
           + ops.basis_state([3, 3], [2, 0])) / math.sqrt(2.0)
    duration = 0.3e-6
    res = propagate_lindblad(h, collapse_operators(dev),
                             ops.density_from_state(psi), duration, dt=1e-9,
                             stride=10**9)
    i20 = ops.basis_index([3, 3], [2, 0])
    # Rate (2/Tphi) * |n_i - n_j|^2 / 2 = 4/Tphi for the 0-2 coherence.
    assert abs(res.final_density[0, i20]) == pytest.approx(
        0.5 * math.exp(-4.0 * duration / tphi), abs=1e-6)
