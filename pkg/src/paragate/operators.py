"""Dense complex linear algebra for small Hilbert spaces (dim <= 16).

Operators and states are plain numpy arrays: operators are square complex
matrices, pure states are complex vectors, density matrices are Hermitian
unit-trace matrices.  All Hamiltonians are expressed in angular-frequency
units (rad/s) with hbar factored out, so the propagator for a constant
Hamiltonian H over a time step dt is exp(-1j * H * dt).

Subsystem ordering is fixed as (Q1, Q2): index 0 is the first transmon, and
basis states are labeled |q1 q2> with q1 the slow index.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_ATOL = 1e-12

# Pauli matrices and the two-level identity, used throughout.
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


class DimensionMismatchError(ValueError):
    """Raised when operator/state dimensions are inconsistent."""


class NotHermitianError(ValueError):
    """Raised when an operation requires a Hermitian input."""


def is_hermitian(op: np.ndarray, atol: float = 1e-9) -> bool:
    return bool(np.max(np.abs(op - op.conj().T)) <= atol)


def require_hermitian(op: np.ndarray, atol: float = 1e-9) -> None:
    if not is_hermitian(op, atol):
        raise NotHermitianError(
            f"operator is not Hermitian within {atol} (max deviation "
            f"{np.max(np.abs(op - op.conj().T)):.3e})"
        )


def lowering(dim: int) -> np.ndarray:
    """Ladder (annihilation) operator a on a truncated dim-level oscillator."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def number(dim: int) -> np.ndarray:
    """Number operator n = a^dagger a."""
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product with (Q1, Q2) ordering: index = i * dim_b + k."""
    return np.kron(a, b)


def embed(op: np.ndarray, site: int, dims: list[int]) -> np.ndarray:
    """Embed a single-subsystem operator into the full tensor-product space.

    Identity acts on every site other than `site`.
    """
    if not 0 <= site < len(dims):
        raise DimensionMismatchError(f"site {site} outside {len(dims)} subsystems")
    if op.shape != (dims[site], dims[site]):
        raise DimensionMismatchError(
            f"operator dim {op.shape[0]} != subsystem dim {dims[site]}"
        )
    out = np.array([[1.0 + 0j]])
    for i, d in enumerate(dims):
        out = np.kron(out, op if i == site else np.eye(d, dtype=complex))
    return out


def basis_state(dims: list[int], occupations: list[int]) -> np.ndarray:
    """Product basis state |occupations> as a complex amplitude vector."""
    if len(dims) != len(occupations):
        raise DimensionMismatchError("dims and occupations length mismatch")
    index = 0
    for d, k in zip(dims, occupations):
        if not 0 <= k < d:
            raise DimensionMismatchError(f"occupation {k} outside 0..{d - 1}")
        index = index * d + k
    psi = np.zeros(int(np.prod(dims)), dtype=complex)
    psi[index] = 1.0
    return psi


def basis_index(dims: list[int], occupations: list[int]) -> int:
    index = 0
    for d, k in zip(dims, occupations):
        index = index * d + k
    return index


def expm_propagator(h: np.ndarray, dt: float) -> np.ndarray:
    """Unitary exp(-1j * h * dt) via eigendecomposition of the Hermitian h.

    Exact and cheap for the dims <= 16 used here, and unitary up to the
    orthogonality of the eigenbasis (<= 1e-10).
    """
    require_hermitian(h)
    evals, evecs = np.linalg.eigh(h)
    phases = np.exp(-1j * evals * dt)
    return (evecs * phases) @ evecs.conj().T


def expectation(state: np.ndarray, op: np.ndarray, imag_atol: float = 1e-10) -> float:
    """Real expectation value <psi|op|psi> of a Hermitian operator."""
    if op.shape != (state.shape[0], state.shape[0]):
        raise DimensionMismatchError(
            f"operator dim {op.shape} does not match state dim {state.shape[0]}"
        )
    require_hermitian(op)
    value = np.vdot(state, op @ state)
    if abs(value.imag) > imag_atol * max(1.0, abs(value.real)):
        raise ValueError(f"expectation has imaginary residue {value.imag:.3e}")
    return float(value.real)


def density_from_state(state: np.ndarray) -> np.ndarray:
    return np.outer(state, state.conj())


def check_density(rho: np.ndarray, herm_atol: float = 1e-9,
                  trace_atol: float = 1e-7, eig_atol: float = 1e-7) -> None:
    """Validate Hermiticity, unit trace, and positivity of a density matrix."""
    if not is_hermitian(rho, herm_atol):
        raise NotHermitianError("density matrix not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_atol:
        raise ValueError(f"density matrix trace {tr} deviates from 1")
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -eig_atol:
        raise ValueError(f"density matrix has negative eigenvalue {evals.min():.3e}")
