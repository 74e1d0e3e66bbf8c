import numpy as np
import pytest

from paragate import operators as ops


def test_lowering_number_algebra():
    for dim in (2, 3, 4):
        a = ops.lowering(dim)
        n = ops.number(dim)
        assert np.allclose(a.conj().T @ a, n)
        # Canonical commutator holds below the truncation edge.
        comm = a @ a.conj().T - a.conj().T @ a
        assert np.allclose(comm[:-1, :-1], np.eye(dim - 1))


def test_embed_acts_on_named_site_only():
    dims = [3, 3]
    n = ops.number(3)
    n1 = ops.embed(n, 0, dims)
    n2 = ops.embed(n, 1, dims)
    psi = ops.basis_state(dims, [2, 1])
    assert ops.expectation(psi, n1) == pytest.approx(2.0)
    assert ops.expectation(psi, n2) == pytest.approx(1.0)
    # Operators on different sites commute.
    assert np.allclose(n1 @ n2, n2 @ n1)


def test_embed_dimension_checks():
    with pytest.raises(ops.DimensionMismatchError):
        ops.embed(ops.number(2), 0, [3, 3])
    with pytest.raises(ops.DimensionMismatchError):
        ops.embed(ops.number(3), 2, [3, 3])


def test_basis_state_index_roundtrip():
    dims = [3, 3]
    for i in range(3):
        for j in range(3):
            idx = ops.basis_index(dims, [i, j])
            psi = ops.basis_state(dims, [i, j])
            assert psi[idx] == 1.0
            assert np.count_nonzero(psi) == 1
    # (Q1, Q2) ordering: Q1 is the slow index.
    assert ops.basis_index(dims, [1, 0]) == 3


def test_basis_state_validation():
    with pytest.raises(ops.DimensionMismatchError):
        ops.basis_state([2, 2], [0, 2])
    with pytest.raises(ops.DimensionMismatchError):
        ops.basis_state([2, 2], [0])


def test_expm_propagator_unitary_and_composition():
    rng = np.random.default_rng(3)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = 0.5 * (m + m.conj().T)
    u1 = ops.expm_propagator(h, 0.3)
    u2 = ops.expm_propagator(h, 0.6)
    assert np.max(np.abs(u1 @ u1.conj().T - np.eye(4))) < 1e-10
    assert np.max(np.abs(u1 @ u1 - u2)) < 1e-10


def test_expm_propagator_matches_two_level_rotation():
    u = ops.expm_propagator(0.5 * ops.SIGMA_X, np.pi)
    # exp(-i pi sx/2) = -i sx
    assert np.allclose(u, -1j * ops.SIGMA_X)


def test_expm_propagator_rejects_non_hermitian():
    with pytest.raises(ops.NotHermitianError):
        ops.expm_propagator(ops.lowering(3), 0.1)


def test_expectation_checks_hermiticity():
    psi = np.array([1.0, 0.0], dtype=complex)
    with pytest.raises(ops.NotHermitianError):
        ops.expectation(psi, np.array([[0, 1], [0, 0]], dtype=complex))


def test_density_checks():
    psi = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
    rho = ops.density_from_state(psi)
    ops.check_density(rho)
    with pytest.raises(ValueError):
        ops.check_density(2.0 * rho)
    bad = np.diag([1.5, -0.5]).astype(complex)
    with pytest.raises(ValueError):
        ops.check_density(bad)
