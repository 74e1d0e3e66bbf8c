"""Time-dependent Hamiltonian assembly, propagation, and fidelity metrics.

Hamiltonians are represented as sums of Hermitian static operators with
real, time-dependent scalar coefficients.  Pure states are propagated with
a piecewise-constant midpoint exponential (unconditionally unitary);
density matrices with fixed-step RK4 on the Lindblad equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

from . import operators as ops
from .device import DeviceParams, collapse_operators
from .pulses import SuperadiabaticSchedule, Waveform


class StepSizeError(RuntimeError):
    """Raised when the Lindblad integrator loses the trace."""


@dataclass
class TimeDependentHamiltonian:
    """H(t) = sum_k coeff_k(t) * M_k with Hermitian M_k and real coeff_k."""

    terms: list[tuple[np.ndarray, Callable[[float], float]]]
    dim: int

    def __post_init__(self):
        for mat, _ in self.terms:
            if mat.shape != (self.dim, self.dim):
                raise ops.DimensionMismatchError("term dimension mismatch")
            ops.require_hermitian(mat)

    def at(self, t: float) -> np.ndarray:
        h = np.zeros((self.dim, self.dim), dtype=complex)
        for mat, coeff in self.terms:
            h += coeff(t) * mat
        return h


@dataclass
class PropagationResult:
    times: np.ndarray
    states: np.ndarray | None = None        # sampled pure-state trajectory
    densities: np.ndarray | None = None     # sampled density trajectory
    final_state: np.ndarray | None = None
    final_density: np.ndarray | None = None
    unitary: np.ndarray | None = None       # accumulated propagator


@dataclass
class GateFidelityReport:
    process_fidelity: float
    average_gate_fidelity: float
    local_phases: tuple[float, float]
    leakage: float


def sampled_coefficient(times: np.ndarray,
                        values: np.ndarray) -> Callable[[float], float]:
    """Linear-interpolation closure over a sampled coefficient."""
    def coeff(t: float) -> float:
        return float(np.interp(t, times, values))
    return coeff


def constant_coefficient(value: float) -> Callable[[float], float]:
    return lambda t: value


def drift_hamiltonian(dev: DeviceParams) -> np.ndarray:
    """Static part: qubit frequencies, anharmonicity, transverse coupling."""
    dims = dev.dims
    n = ops.number(dev.levels)
    a = ops.lowering(dev.levels)
    anharm = n @ (n - np.eye(dev.levels))
    h = (dev.omega1 * ops.embed(n, 0, dims)
         + dev.omega2 * ops.embed(n, 1, dims)
         + 0.5 * dev.eta1 * ops.embed(anharm, 0, dims)
         + 0.5 * dev.eta2 * ops.embed(anharm, 1, dims))
    coupling = ops.embed(a, 0, dims).conj().T @ ops.embed(a, 1, dims)
    h = h + dev.g * (coupling + coupling.conj().T)
    return h


def build_lab_hamiltonian(dev: DeviceParams,
                          wf: Waveform) -> TimeDependentHamiltonian:
    """Lab-frame H(t): drift plus the longitudinal modulation F-dot(t) n1."""
    dims = dev.dims
    n1 = ops.embed(ops.number(dev.levels), 0, dims)
    terms = [
        (drift_hamiltonian(dev), constant_coefficient(1.0)),
        (n1, sampled_coefficient(wf.times, wf.f_dot)),
    ]
    return TimeDependentHamiltonian(terms=terms, dim=dev.dim)


def build_rotating_hamiltonian(dev: DeviceParams,
                               wf: Waveform) -> TimeDependentHamiltonian:
    """H(t) in the frame rotating with the bare levels and the modulation.

    Frame generator: (omega1 t + F(t)) n1 + omega2 t n2 + anharmonic terms.
    Only the transverse coupling survives, with element phases
    exp(i (E_i - E_j) t + i F(t)) on each n1-raising pair.  Norms are O(g),
    which keeps explicit Lindblad integration stable at the waveform grid.
    Populations agree with the lab frame; unitaries are related by the
    diagonal frame transformation.
    """
    dims = dev.dims
    levels = dev.levels
    energies = {}
    for i in range(levels):
        for j in range(levels):
            energies[(i, j)] = (dev.omega1 * i + dev.omega2 * j
                                + 0.5 * dev.eta1 * i * (i - 1)
                                + 0.5 * dev.eta2 * j * (j - 1))
    dim = dev.dim
    f_interp = sampled_coefficient(wf.times, wf.f_samples)
    terms: list[tuple[np.ndarray, Callable[[float], float]]] = []
    # Pairs coupled by a1^dagger a2: |n1+1, n2-1><n1, n2|.
    for n1 in range(levels - 1):
        for n2 in range(1, levels):
            row = ops.basis_index(dims, [n1 + 1, n2 - 1])
            col = ops.basis_index(dims, [n1, n2])
            strength = dev.g * math.sqrt((n1 + 1) * n2)
            detuning = energies[(n1 + 1, n2 - 1)] - energies[(n1, n2)]
            x_op = np.zeros((dim, dim), dtype=complex)
            x_op[row, col] = x_op[col, row] = 1.0
            y_op = np.zeros((dim, dim), dtype=complex)
            y_op[row, col] = -1j
            y_op[col, row] = 1j

            def cos_coeff(t, d=detuning, s=strength):
                return s * math.cos(d * t + f_interp(t))

            def sin_coeff(t, d=detuning, s=strength):
                return -s * math.sin(d * t + f_interp(t))

            terms.append((x_op, cos_coeff))
            terms.append((y_op, sin_coeff))
    return TimeDependentHamiltonian(terms=terms, dim=dim)


def build_effective_hamiltonian(sched: SuperadiabaticSchedule,
                                amplitude_scale: float = 1.0
                                ) -> TimeDependentHamiltonian:
    """Two-level effective H(t) in the {upper, lower} transfer subspace.

    H = (1/2)[Delta sz + W (cos(Phi) sx + sin(Phi) sy)] with
    (W, Phi) = (Omega_S, phi + phi_S).  The uncorrected (adiabatic or
    dynamical) case is obtained by wrapping the base schedule with
    pulses.uncorrected_schedule.  `amplitude_scale` multiplies the
    transverse drive only, modeling an uncompensated amplitude error.
    """
    t = sched.times
    phase = sched.phi + sched.phi_s
    wx = amplitude_scale * sched.omega_s * np.cos(phase)
    wy = amplitude_scale * sched.omega_s * np.sin(phase)
    terms = [
        (0.5 * ops.SIGMA_Z, sampled_coefficient(t, sched.delta)),
        (0.5 * ops.SIGMA_X, sampled_coefficient(t, wx)),
        (0.5 * ops.SIGMA_Y, sampled_coefficient(t, wy)),
    ]
    return TimeDependentHamiltonian(terms=terms, dim=2)


def _step_count(duration: float, dt: float) -> int:
    n = int(round(duration / dt))
    if n < 1 or abs(n * dt - duration) > 0.5 * dt:
        raise ValueError(f"dt {dt} does not divide duration {duration}")
    return n


def propagate_unitary(h: TimeDependentHamiltonian, duration: float, dt: float,
                      psi0: np.ndarray | None = None,
                      stride: int = 1) -> PropagationResult:
    """Piecewise-constant midpoint-rule propagation.

    Each step applies exp(-1j H(t + dt/2) dt).  With psi0 given, the state
    trajectory is sampled every `stride` steps (always including t=0 and
    t=duration); without psi0 the accumulated unitary is returned.
    """
    n = _step_count(duration, dt)
    track_state = psi0 is not None
    if track_state:
        state = psi0.astype(complex)
        times = [0.0]
        traj = [state.copy()]
    else:
        u = np.eye(h.dim, dtype=complex)
    for i in range(n):
        step = ops.expm_propagator(h.at((i + 0.5) * dt), dt)
        if track_state:
            state = step @ state
            if (i + 1) % stride == 0 or i == n - 1:
                times.append((i + 1) * dt)
                traj.append(state.copy())
        else:
            u = step @ u
    if track_state:
        return PropagationResult(times=np.array(times), states=np.array(traj),
                                 final_state=state)
    return PropagationResult(times=np.array([duration]), unitary=u)


def _lindblad_rhs(h_t: np.ndarray, rho: np.ndarray,
                  c_ops: Sequence[np.ndarray],
                  c_dag_c: Sequence[np.ndarray]) -> np.ndarray:
    out = -1j * (h_t @ rho - rho @ h_t)
    for L, LdL in zip(c_ops, c_dag_c):
        out += L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL)
    return out


def propagate_lindblad(h: TimeDependentHamiltonian,
                       c_ops: Sequence[np.ndarray], rho0: np.ndarray,
                       duration: float, dt: float,
                       stride: int = 1) -> PropagationResult:
    """Fixed-step RK4 on the Lindblad master equation.

    The state is re-symmetrized each step; trace drift beyond 1e-5 aborts
    with StepSizeError.
    """
    n = _step_count(duration, dt)
    c_dag_c = [L.conj().T @ L for L in c_ops]
    rho = rho0.astype(complex)
    times = [0.0]
    traj = [rho.copy()]
    for i in range(n):
        t = i * dt
        h0 = h.at(t)
        h1 = h.at(t + 0.5 * dt)
        h2 = h.at(t + dt)
        k1 = _lindblad_rhs(h0, rho, c_ops, c_dag_c)
        k2 = _lindblad_rhs(h1, rho + 0.5 * dt * k1, c_ops, c_dag_c)
        k3 = _lindblad_rhs(h1, rho + 0.5 * dt * k2, c_ops, c_dag_c)
        k4 = _lindblad_rhs(h2, rho + dt * k3, c_ops, c_dag_c)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        drift = abs(np.trace(rho).real - 1.0)
        if drift > 1e-5:
            raise StepSizeError(
                f"step size too large: trace drift {drift:.2e} at step {i + 1}")
        if (i + 1) % stride == 0 or i == n - 1:
            times.append((i + 1) * dt)
            traj.append(rho.copy())
    return PropagationResult(times=np.array(times), densities=np.array(traj),
                             final_density=rho)


def _liouvillian_pieces(h: TimeDependentHamiltonian,
                        c_ops: Sequence[np.ndarray]):
    """Row-major-vec superoperator pieces: per-term Hamiltonian commutators
    plus the static dissipator."""
    d = h.dim
    eye = np.eye(d)
    ham_pieces = []
    for mat, coeff in h.terms:
        ham_pieces.append((coeff,
                           -1j * (np.kron(mat, eye) - np.kron(eye, mat.T))))
    diss = np.zeros((d * d, d * d), dtype=complex)
    for L in c_ops:
        LdL = L.conj().T @ L
        diss += (np.kron(L, L.conj())
                 - 0.5 * np.kron(LdL, eye) - 0.5 * np.kron(eye, LdL.T))
    return ham_pieces, diss


def lindblad_superoperator(h: TimeDependentHamiltonian,
                           c_ops: Sequence[np.ndarray], duration: float,
                           dt: float) -> np.ndarray:
    """Integrate the full quantum channel of a time-dependent Lindblad
    evolution as a (d^2 x d^2) superoperator on row-major-vectorized rho.

    Same RK4 stepping as propagate_lindblad, applied to all basis states at
    once; the result can be applied repeatedly (e.g. per gate in a
    benchmarking sequence) at matrix-vector cost.
    """
    n = _step_count(duration, dt)
    ham_pieces, diss = _liouvillian_pieces(h, c_ops)

    def liouvillian(t: float) -> np.ndarray:
        out = diss.copy()
        for coeff, piece in ham_pieces:
            out += coeff(t) * piece
        return out

    d2 = h.dim * h.dim
    s = np.eye(d2, dtype=complex)
    for i in range(n):
        t = i * dt
        l0 = liouvillian(t)
        l1 = liouvillian(t + 0.5 * dt)
        l2 = liouvillian(t + dt)
        k1 = l0 @ s
        k2 = l1 @ (s + 0.5 * dt * k1)
        k3 = l1 @ (s + 0.5 * dt * k2)
        k4 = l2 @ (s + dt * k3)
        s = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return s


def unitary_superoperator(u: np.ndarray) -> np.ndarray:
    """Channel rho -> U rho U^dagger on row-major-vectorized rho."""
    return np.kron(u, u.conj())


def idle_channel(dev: DeviceParams, duration: float, dt: float) -> np.ndarray:
    """Decoherence-only channel (H = 0 in the rotating frame) of `duration`."""
    h = TimeDependentHamiltonian(
        terms=[(np.zeros((dev.dim, dev.dim), dtype=complex),
                constant_coefficient(0.0))], dim=dev.dim)
    return lindblad_superoperator(h, collapse_operators(dev), duration, dt)


def _local_z(z1: float, z2: float) -> np.ndarray:
    """diag phases of exp(i z1) on Q1 = |1>, exp(i z2) on Q2 = |1>."""
    return np.diag(np.exp(1j * np.array([0.0, z2, z1, z1 + z2])))


def computational_indices(levels: int) -> list[int]:
    """Indices of |00>, |01>, |10>, |11> in the full product basis."""
    return [ops.basis_index([levels, levels], [i, j])
            for i in (0, 1) for j in (0, 1)]


def process_fidelity(u: np.ndarray, target: np.ndarray,
                     correct_local_phases: bool = True,
                     levels: int | None = None) -> GateFidelityReport:
    """Average gate fidelity of u against a 4x4 computational-subspace target.

    u may act on the full (possibly 3-level) space; it is projected onto the
    computational subspace first.  Local Z phases (z1, z2) are optimized by
    a coarse grid plus Nelder-Mead refinement when requested.
    """
    d = 4
    if u.shape[0] == d:
        m = u
    else:
        if levels is None:
            levels = int(round(math.sqrt(u.shape[0])))
        comp = computational_indices(levels)
        m = u[np.ix_(comp, comp)]
    leakage = 1.0 - float(np.mean(np.sum(np.abs(m) ** 2, axis=0)))

    def trace_mag(z1: float, z2: float) -> float:
        return abs(np.trace(_local_z(z1, z2) @ target.conj().T @ m))

    if correct_local_phases:
        grid = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
        zz1, zz2 = np.meshgrid(grid, grid, indexing="ij")
        values = np.array([[trace_mag(a, b) for b in grid] for a in grid])
        i, j = np.unravel_index(np.argmax(values), values.shape)
        res = minimize(lambda z: -trace_mag(z[0], z[1]),
                       x0=[grid[i], grid[j]], method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-12})
        z1, z2 = float(res.x[0]), float(res.x[1])
    else:
        z1 = z2 = 0.0
    tr = trace_mag(z1, z2)
    f_pro = tr**2 / d**2
    f_avg = (tr**2 + d) / (d * (d + 1))
    return GateFidelityReport(process_fidelity=f_pro,
                              average_gate_fidelity=f_avg,
                              local_phases=(z1, z2), leakage=leakage)
