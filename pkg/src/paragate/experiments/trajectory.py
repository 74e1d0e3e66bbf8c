"""State-trajectory tomography in the {|01>, |10>} transfer subspace.

Propagates the effective-frame drive (with or without the counterdiabatic
correction) from |01> and records the Bloch components.  With decoherence
the dynamics runs on the full two-qubit density matrix, with the drive
embedded in the transfer block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import operators as ops
from ..device import DeviceParams, collapse_operators
from ..dynamics import (TimeDependentHamiltonian, build_effective_hamiltonian,
                        propagate_lindblad, propagate_unitary,
                        sampled_coefficient)
from ..pulses import (SuperadiabaticSchedule, base_schedule,
                      default_swap_amplitude, superadiabatic_schedule,
                      uncorrected_schedule)

SCHEMES = ("superadiabatic", "adiabatic")


@dataclass
class TrajectoryResult:
    times: np.ndarray
    bloch: np.ndarray        # (n, 3) components (x, y, z); z = +1 at |01>
    p_up: np.ndarray         # population of |01>
    p_down: np.ndarray       # population of |10>
    scheme: str
    decoherence: bool


def transfer_subspace_paulis(dev: DeviceParams):
    """Pauli operators of the {|01>, |10>} block on the full space."""
    dims = dev.dims
    up = ops.basis_state(dims, [0, 1])
    down = ops.basis_state(dims, [1, 0])
    sx = np.outer(up, down.conj()) + np.outer(down, up.conj())
    sy = -1j * np.outer(up, down.conj()) + 1j * np.outer(down, up.conj())
    sz = np.outer(up, up.conj()) - np.outer(down, down.conj())
    return sx, sy, sz


def embed_effective_hamiltonian(h2: TimeDependentHamiltonian,
                                dev: DeviceParams) -> TimeDependentHamiltonian:
    """Lift a 2x2 transfer-block Hamiltonian onto the full product space."""
    up = ops.basis_state(dev.dims, [0, 1])
    down = ops.basis_state(dev.dims, [1, 0])
    basis = np.column_stack([up, down])
    terms = [(basis @ mat @ basis.conj().T, coeff) for mat, coeff in h2.terms]
    return TimeDependentHamiltonian(terms=terms, dim=dev.dim)


def build_schedule(scheme: str, duration: float, omega0: float,
                   dt: float) -> SuperadiabaticSchedule:
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    base = base_schedule(duration, omega0, dt)
    if scheme == "superadiabatic":
        return superadiabatic_schedule(base)
    return uncorrected_schedule(base)


def trajectory(scheme: str, duration: float, dev: DeviceParams,
               decoherence: bool = False, omega0: float | None = None,
               dt: float = 0.1e-9, stride: int = 10) -> TrajectoryResult:
    """Record the Bloch-sphere path of the transfer starting from |01>."""
    if duration < 10 * dt:
        raise ValueError("duration must cover at least 10 samples")
    if omega0 is None:
        omega0 = default_swap_amplitude(dev.g, duration)
    sched = build_schedule(scheme, duration, omega0, dt)
    h2 = build_effective_hamiltonian(sched)
    if not decoherence:
        res = propagate_unitary(h2, duration, dt,
                                psi0=np.array([1.0, 0.0], dtype=complex),
                                stride=stride)
        states = res.states
        x = 2.0 * (states[:, 0].conj() * states[:, 1]).real
        y = 2.0 * (states[:, 0].conj() * states[:, 1]).imag
        z = np.abs(states[:, 0]) ** 2 - np.abs(states[:, 1]) ** 2
        p_up = np.abs(states[:, 0]) ** 2
        p_down = np.abs(states[:, 1]) ** 2
    else:
        h_full = embed_effective_hamiltonian(h2, dev)
        rho0 = ops.density_from_state(ops.basis_state(dev.dims, [0, 1]))
        res = propagate_lindblad(h_full, collapse_operators(dev), rho0,
                                 duration, dt, stride=stride)
        sx, sy, sz = transfer_subspace_paulis(dev)
        rhos = res.densities
        x = np.einsum("nij,ji->n", rhos, sx).real
        y = np.einsum("nij,ji->n", rhos, sy).real
        z = np.einsum("nij,ji->n", rhos, sz).real
        up = ops.basis_index(dev.dims, [0, 1])
        down = ops.basis_index(dev.dims, [1, 0])
        p_up = rhos[:, up, up].real
        p_down = rhos[:, down, down].real
    bloch = np.column_stack([x, y, z])
    return TrajectoryResult(times=res.times, bloch=bloch, p_up=p_up,
                            p_down=p_down, scheme=scheme,
                            decoherence=decoherence)
