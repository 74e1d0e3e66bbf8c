"""Interleaved randomized benchmarking with pluggable gate-noise models.

Random Clifford sequences (optionally interleaved with the target channel)
are closed by the recovery element inverting the ideal product, simulated
from |00>, and the survival probability is fit to A p^m + B.  Gate models:

- IdealModel: every primitive is its ideal unitary (bookkeeping oracle).
- DepolarizingModel: ideal unitaries followed by a uniform depolarizing
  contraction per element (statistical oracle: fitted p equals the
  injected parameter).
- LindbladModel: the conditional-phase gate as its full decoherent
  waveform channel; single-qubit layers as instantaneous rotations
  followed by a fixed idle-decoherence window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import curve_fit

from .. import operators as ops
from ..device import DeviceParams, collapse_operators
from ..dynamics import (build_rotating_hamiltonian, idle_channel,
                        lindblad_superoperator, process_fidelity,
                        propagate_unitary, unitary_superoperator)
from ..pulses import default_swap_amplitude, waveform
from .clifford import (CliffordElement, element_unitary, generate_clifford,
                       inverse_index, _single_qubit_unitary)
from .cz import CZ_TARGET, _cz_modulation, calibrate_cz_trims

VARIANTS = ("reference", "interleaved-cz", "interleaved-idle")


@dataclass
class ExponentialFit:
    a: float
    p: float
    b: float
    degenerate: bool = False


@dataclass
class RBResult:
    lengths: np.ndarray
    survival: np.ndarray          # mean P(|00>) per length
    std_err: np.ndarray           # standard error over randomizations
    raw: np.ndarray               # (len(lengths), k)
    fit: ExponentialFit
    variant: str
    error_rate: float | None = None


def fit_exponential(lengths, means) -> ExponentialFit:
    """Nonlinear least-squares fit of A p^m + B with 0 < p < 1.

    Flat data (no decay to resolve) and non-converging fits are returned
    with the degenerate flag set instead of raising.
    """
    lengths = np.asarray(lengths, dtype=float)
    means = np.asarray(means, dtype=float)
    if len(lengths) < 3 or len(set(lengths)) < 3:
        raise ValueError("need at least 3 distinct sequence lengths")
    if np.ptp(means) < 1e-9:
        return ExponentialFit(a=0.0, p=1.0, b=float(means.mean()),
                              degenerate=True)
    b0 = 0.25
    a0 = float(np.clip(means[0] - b0, 0.05, 1.0))
    try:
        popt, _ = curve_fit(
            lambda m, a, p, b: a * p**m + b, lengths, means,
            p0=[a0, 0.95, b0],
            bounds=([-2.0, 1e-9, -1.0], [2.0, 1.0 - 1e-12, 1.0]),
            maxfev=20000)
    except RuntimeError:
        return ExponentialFit(a=math.nan, p=math.nan, b=math.nan,
                              degenerate=True)
    return ExponentialFit(a=float(popt[0]), p=float(popt[1]),
                          b=float(popt[2]))


def interleaved_error_rate(p_interleaved: float, p_reference: float,
                           d: int = 4) -> float:
    """r = (1 - p_int/p_ref) (d - 1)/d."""
    return (1.0 - p_interleaved / p_reference) * (d - 1) / d


class IdealModel:
    """Noise-free execution on 4-dimensional state vectors."""

    def prepare(self) -> np.ndarray:
        state = np.zeros(4, dtype=complex)
        state[0] = 1.0
        return state

    def apply(self, state: np.ndarray, item) -> np.ndarray:
        if isinstance(item, CliffordElement):
            return element_unitary(item) @ state
        if item == "cz":
            return CZ_TARGET @ state
        return state  # idle

    def survival(self, state: np.ndarray) -> float:
        return float(np.abs(state[0]) ** 2)


class DepolarizingModel:
    """Ideal unitaries plus a uniform depolarizing contraction.

    Each applied element (Clifford or interleaved target) contracts the
    traceless part of rho by its parameter, so the fitted RB decay equals
    the Clifford parameter exactly.
    """

    def __init__(self, p: float, p_interleaved: float | None = None):
        if not 0.0 < p <= 1.0:
            raise ValueError("depolarizing parameter must be in (0, 1]")
        self.p = p
        self.p_interleaved = p if p_interleaved is None else p_interleaved

    def prepare(self) -> np.ndarray:
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = 1.0
        return rho

    @staticmethod
    def _depolarize(rho: np.ndarray, p: float) -> np.ndarray:
        return p * rho + (1.0 - p) * np.eye(4) / 4.0

    def apply(self, rho: np.ndarray, item) -> np.ndarray:
        if isinstance(item, CliffordElement):
            u = element_unitary(item)
            return self._depolarize(u @ rho @ u.conj().T, self.p)
        if item == "cz":
            return self._depolarize(CZ_TARGET @ rho @ CZ_TARGET.conj().T,
                                    self.p_interleaved)
        return self._depolarize(rho, self.p_interleaved)

    def survival(self, rho: np.ndarray) -> float:
        return float(rho[0, 0].real)


class LindbladModel:
    """Decoherent execution on the full (3-level) two-transmon space.

    The conditional-phase channel integrates the Lindblad equation over
    the synthesized round-trip waveform once, followed by the local-phase
    correction of its coherent part.  Single-qubit Clifford layers are
    instantaneous rotations followed by an idle-decoherence window.
    """

    def __init__(self, dev: DeviceParams, segment_duration: float = 60e-9,
                 single_qubit_idle: float = 30e-9, dt: float = 0.1e-9):
        if dev.levels != 3:
            raise ValueError("Lindblad gate model requires a 3-level device")
        self.dev = dev
        self.segment_duration = segment_duration
        self.cz_duration = 2.0 * segment_duration
        omega0 = default_swap_amplitude(math.sqrt(2.0) * dev.g,
                                        segment_duration)
        c_ops = collapse_operators(dev)

        trims = calibrate_cz_trims(dev.without_decoherence(),
                                   segment_duration, omega0, dt)
        mod = _cz_modulation(dev, segment_duration, omega0, dt, trims)
        h = build_rotating_hamiltonian(dev, waveform(mod, dev))
        u = propagate_unitary(h, self.cz_duration, dt).unitary
        report = process_fidelity(u, CZ_TARGET, levels=dev.levels)
        z1, z2 = report.local_phases
        phases = np.array([z1 * n1 + z2 * n2 for n1 in range(3)
                           for n2 in range(3)])
        correction = np.diag(np.exp(1j * phases))
        self.cz_channel = (unitary_superoperator(correction)
                           @ lindblad_superoperator(h, c_ops,
                                                    self.cz_duration, dt))
        self.cz_report = report
        self.idle_layer = idle_channel(dev, single_qubit_idle, dt)
        self.idle_interleaved = idle_channel(dev, self.cz_duration, dt)
        self._layer_cache: dict = {}

    def _layer_channel(self, layer) -> np.ndarray:
        if layer not in self._layer_cache:
            mats = []
            for tokens in layer:
                u2 = _single_qubit_unitary(tokens)
                lifted = np.eye(3, dtype=complex)
                lifted[:2, :2] = u2
                mats.append(lifted)
            u_full = ops.kron(mats[0], mats[1])
            self._layer_cache[layer] = (
                self.idle_layer @ unitary_superoperator(u_full))
        return self._layer_cache[layer]

    def prepare(self) -> np.ndarray:
        rho = np.zeros(81, dtype=complex)
        rho[0] = 1.0  # vectorized |00><00|
        return rho

    def apply(self, rho: np.ndarray, item) -> np.ndarray:
        if isinstance(item, CliffordElement):
            for layer in item.layers:
                channel = (self.cz_channel if layer == "cz"
                           else self._layer_channel(layer))
                rho = channel @ rho
            return rho
        if item == "cz":
            return self.cz_channel @ rho
        return self.idle_interleaved @ rho

    def survival(self, rho: np.ndarray) -> float:
        return float(rho[0].real)


def _ideal_item_unitary(item) -> np.ndarray:
    if isinstance(item, CliffordElement):
        return element_unitary(item)
    if item == "cz":
        return CZ_TARGET
    return np.eye(4, dtype=complex)


@lru_cache(maxsize=None)
def _cached_element(index: int) -> CliffordElement:
    return generate_clifford(index)


def run_rb(variant: str, lengths, k: int = 60, seed: int = 0,
           model=None) -> RBResult:
    """Run a randomized-benchmarking experiment.

    Sequences are drawn from per-(length, randomization) counter-derived
    RNG streams, so results are independent of execution order.  For
    interleaved variants the error rate must be extracted by pairing with
    a reference run via interleaved_error_rate.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected {VARIANTS}")
    lengths = np.asarray(lengths, dtype=int)
    if np.any(np.diff(lengths) <= 0):
        raise ValueError("sequence lengths must be strictly increasing")
    if k < 1:
        raise ValueError("need at least one randomization")
    if model is None:
        model = IdealModel()
    raw = np.zeros((len(lengths), k))
    for mi, m in enumerate(lengths):
        for ki in range(k):
            rng = np.random.default_rng([seed, int(m), ki])
            indices = rng.integers(0, 11520, size=int(m))
            items: list = []
            for idx in indices:
                items.append(_cached_element(int(idx)))
                if variant == "interleaved-cz":
                    items.append("cz")
                elif variant == "interleaved-idle":
                    items.append("idle")
            u_seq = np.eye(4, dtype=complex)
            for item in items:
                u_seq = _ideal_item_unitary(item) @ u_seq
            items.append(_cached_element(inverse_index(u_seq)))
            state = model.prepare()
            for item in items:
                state = model.apply(state, item)
            raw[mi, ki] = model.survival(state)
    survival = raw.mean(axis=1)
    std_err = raw.std(axis=1, ddof=1) / math.sqrt(k) if k > 1 \
        else np.zeros(len(lengths))
    fit = fit_exponential(lengths, survival)
    return RBResult(lengths=lengths, survival=survival, std_err=std_err,
                    raw=raw, fit=fit, variant=variant)
