import math

import numpy as np
import pytest

from paragate.device import load_preset
from paragate.experiments import (CZTrims, DepolarizingModel, IdealModel,
                                  calibrate_effective_coupling,
                                  clifford_unitaries, cz_gate,
                                  fit_exponential, generate_clifford,
                                  interleaved_error_rate, robustness_scan,
                                  run_rb, trajectory)
from paragate.experiments.calibration import CalibrationRangeError
from paragate.experiments.clifford import (C1, GROUP_ORDER, element_unitary,
                                           inverse_index)

# ---------------------------------------------------------------- calibration

def test_calibration_matches_bessel_curve():
    dev = load_preset("swap-point")
    result = calibrate_effective_coupling(dev, [0.8, 1.4], t_max=300e-9)
    from scipy.special import j1 as bessel_j1
    for amp, g_eff in zip(result.amplitudes, result.g_eff):
        assert g_eff == pytest.approx(dev.g * bessel_j1(amp), rel=0.02)


def test_calibration_range_error():
    dev = load_preset("swap-point")
    with pytest.raises(CalibrationRangeError):
        calibrate_effective_coupling(dev, [0.1], t_max=50e-9)


# ----------------------------------------------------------------- trajectory

def test_trajectory_validation():
    dev = load_preset("swap-point")
    with pytest.raises(ValueError, match="scheme"):
        trajectory("bogus", 80e-9, dev)
    with pytest.raises(ValueError):
        trajectory("superadiabatic", 0.5e-9, dev)


def test_trajectory_superadiabatic_transfer():
    dev = load_preset("swap-point")
    result = trajectory("superadiabatic", 80e-9, dev)
    assert result.p_down[-1] > 0.999
    assert np.max(np.abs(result.bloch[:, 1])) < 0.02
    assert np.allclose(result.p_up + result.p_down, 1.0, atol=1e-9)


# ----------------------------------------------------------------- robustness

def test_robustness_validation():
    dev = load_preset("swap-point")
    with pytest.raises(ValueError, match="scheme"):
        robustness_scan("bogus", [1.0, 1.1], [1.0, 1.1], dev)
    with pytest.raises(ValueError):
        robustness_scan("dynamical", [1.1, 1.0], [1.0, 1.1], dev)


def test_robustness_dynamical_matches_rabi_area():
    dev = load_preset("swap-point").without_decoherence()
    axis = np.array([0.92, 1.0, 1.08])
    grid = robustness_scan("dynamical", axis, axis, dev)
    area = 2.0 * grid.omega_xc * grid.t_c
    for i, lam in enumerate(axis):
        for j, mu in enumerate(axis):
            expected = math.sin(lam * mu * area / 2.0) ** 2
            assert grid.fidelity[i, j] == pytest.approx(expected, abs=1e-9)
    assert len(grid.diagonal()) == 3


def test_robustness_marks_ceiling_cells_invalid():
    dev = load_preset("swap-point")
    # Push the center drive close to the coupling ceiling so that positive
    # amplitude errors at short durations are unreachable.
    grid = robustness_scan("superadiabatic", np.array([0.9, 1.1]),
                           np.array([0.9, 1.1]), dev, omega_xc=0.52 * dev.g,
                           t_c=110e-9)
    assert np.isnan(grid.fidelity[1, 0])
    assert np.isfinite(grid.fidelity[0, 1])
    with pytest.raises(ValueError):
        robustness_scan("dynamical", np.array([0.9, 1.0, 1.1]),
                        np.array([0.9, 1.1]), dev).diagonal()


# ------------------------------------------------------------------- clifford

def test_clifford_group_size_and_distinctness():
    assert GROUP_ORDER == 11520
    assert len(C1) == 24
    table = clifford_unitaries()
    assert table.shape == (11520, 4, 4)
    seen = set()
    for u in table:
        # Canonical global phase: first nonzero entry made real positive.
        flat = u.reshape(-1)
        pivot = flat[np.argmax(np.abs(flat) > 1e-9)]
        seen.add((u / (pivot / abs(pivot))).round(6).tobytes())
    assert len(seen) == 11520


def test_clifford_pauli_conjugation():
    table = clifford_unitaries()
    paulis = [np.kron(p, q)
              for p in (np.eye(2), [[0, 1], [1, 0]], [[1, 0], [0, -1]])
              for q in (np.eye(2), [[0, 1], [1, 0]], [[1, 0], [0, -1]])]
    rng = np.random.default_rng(5)
    for idx in rng.integers(0, 11520, size=30):
        u = table[idx]
        for p in (paulis[1], paulis[3], paulis[2], paulis[6]):
            m = u @ np.asarray(p, dtype=complex) @ u.conj().T
            # Image must be a signed Pauli: Hermitian, involutory, monomial.
            assert np.max(np.abs(m - m.conj().T)) < 1e-9
            assert np.max(np.abs(m @ m - np.eye(4))) < 1e-9
            assert np.all(np.abs(np.count_nonzero(
                np.abs(m) > 1e-9, axis=1)) == 1)


def test_clifford_inverse_recovery():
    rng = np.random.default_rng(11)
    for idx in rng.integers(0, 11520, size=20):
        u = element_unitary(generate_clifford(int(idx)))
        inv = element_unitary(generate_clifford(inverse_index(u)))
        prod = inv @ u
        phase = prod[0, 0] / abs(prod[0, 0])
        assert np.max(np.abs(prod / phase - np.eye(4))) < 1e-9


# ------------------------------------------------------------------------- rb

def test_fit_exponential_recovers_parameters():
    m = np.array([1, 3, 6, 10, 20, 40])
    fit = fit_exponential(m, 0.7 * 0.97**m + 0.25)
    assert not fit.degenerate
    assert fit.a == pytest.approx(0.7, abs=1e-6)
    assert fit.p == pytest.approx(0.97, abs=1e-6)
    assert fit.b == pytest.approx(0.25, abs=1e-6)


def test_fit_exponential_degenerate_and_validation():
    fit = fit_exponential([1, 5, 10], [1.0, 1.0, 1.0])
    assert fit.degenerate
    assert fit.p == 1.0
    with pytest.raises(ValueError):
        fit_exponential([1, 5], [1.0, 0.9])


def test_interleaved_error_rate():
    assert interleaved_error_rate(0.9, 0.9) == pytest.approx(0.0)
    assert interleaved_error_rate(0.9405, 0.99) == pytest.approx(
        0.75 * (1.0 - 0.95))


def test_run_rb_validation():
    with pytest.raises(ValueError, match="variant"):
        run_rb("bogus", [1, 3, 5])
    with pytest.raises(ValueError):
        run_rb("reference", [5, 3, 1])
    with pytest.raises(ValueError):
        run_rb("reference", [1, 3, 5], k=0)


def test_run_rb_ideal_is_lossless():
    result = run_rb("interleaved-cz", [1, 4, 8], k=3, seed=2,
                    model=IdealModel())
    assert np.max(np.abs(result.raw - 1.0)) < 1e-9
    assert result.fit.degenerate


def test_run_rb_deterministic_and_order_independent():
    a = run_rb("reference", [1, 4, 8, 12], k=3, seed=9,
               model=DepolarizingModel(0.9))
    b = run_rb("reference", [1, 4, 8, 12], k=3, seed=9,
               model=DepolarizingModel(0.9))
    assert np.array_equal(a.raw, b.raw)
    # Counter-derived streams: a subset of lengths reproduces its rows.
    c = run_rb("reference", [4, 8, 12], k=3, seed=9,
               model=DepolarizingModel(0.9))
    assert np.array_equal(a.raw[1:], c.raw)


def test_depolarizing_model_validation():
    with pytest.raises(ValueError):
        DepolarizingModel(0.0)
    with pytest.raises(ValueError):
        DepolarizingModel(1.5)


# ------------------------------------------------------------------------- cz

def test_cz_requires_three_levels():
    dev = load_preset("swap-point")
    with pytest.raises(ValueError, match="3-level"):
        cz_gate(dev)


def test_cz_trims_defaults():
    trims = CZTrims()
    assert trims.detuning == trims.detuning_split == 0.0
    assert trims.amplitude_split == 0.0
