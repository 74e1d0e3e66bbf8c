"""Two-qubit Clifford group as conditional-phase + single-qubit rotations.

Each of the 11520 elements decomposes into single-qubit Clifford layers
interleaved with up to three CZ applications, following the standard
class structure: 576 single-qubit-like, 576 SWAP-like, 5184 CNOT-like and
5184 iSWAP-like elements.  Elements are represented as token sequences
("x", "y" rotations with an exponent, and "cz"), which downstream gate
models map onto unitaries or noise channels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .. import operators as ops

GROUP_ORDER = 11520

# The 24-element single-qubit Clifford group in XY rotations: 18 elements
# as X^a Y^b and Y^a X^b products, the identity, Y X, and four
# axis-permuting Y-X-Y triples.
_C1_PAIRS = [pair for a, b in product([1.0, 0.5, -0.5], [0.0, 0.5, -0.5])
             for pair in ([("x", a), ("y", b)], [("y", a), ("x", b)])]
C1 = (_C1_PAIRS + [[("x", 0.0)], [("y", 1.0), ("x", 1.0)]]
      + [[("y", a), ("x", b), ("y", c)]
         for a, b, c in [(-0.5, 0.5, 0.5), (-0.5, -0.5, 0.5),
                         (0.5, 0.5, 0.5), (-0.5, 0.5, -0.5)]])

# S1 cosets used by the entangling-class tails.
S1 = [[], [("y", 0.5), ("x", 0.5)], [("x", -0.5), ("y", -0.5)]]
S1_X = [[("x", 0.5)], [("x", 0.5), ("y", 0.5), ("x", 0.5)], [("y", -0.5)]]
S1_Y = [[("y", 0.5)], [("x", -0.5), ("y", -0.5), ("x", 0.5)],
        [("y", 1.0), ("x", 0.5)]]


@dataclass(frozen=True)
class CliffordElement:
    """Token program for one group element.

    Layers alternate between pairs of single-qubit token lists
    (one per qubit) and the "cz" marker.
    """

    index: int
    layers: tuple


def _rotation(axis: str, exponent: float) -> np.ndarray:
    angle = math.pi * exponent
    gen = ops.SIGMA_X if axis == "x" else ops.SIGMA_Y
    return (math.cos(angle / 2.0) * ops.IDENTITY_2
            - 1j * math.sin(angle / 2.0) * gen)


def _single_qubit_unitary(tokens) -> np.ndarray:
    u = ops.IDENTITY_2.astype(complex)
    for axis, exponent in tokens:
        u = _rotation(axis, exponent) @ u
    return u


def generate_clifford(index: int) -> CliffordElement:
    """Build the token program of group element `index` in [0, 11520)."""
    if not 0 <= index < GROUP_ORDER:
        raise ValueError(f"Clifford index {index} outside [0, {GROUP_ORDER})")
    idx0 = index // 480
    idx1 = (index % 480) // 20
    idx2 = index % 20
    layers = [(tuple(C1[idx0]), tuple(C1[idx1]))]
    if idx2 == 1:  # SWAP-like: three CZ with interleaved +/- Y/2
        layers += [
            "cz", ((("y", -0.5),), (("y", 0.5),)),
            "cz", ((("y", 0.5),), (("y", -0.5),)),
            "cz", ((), (("y", 0.5),)),
        ]
    elif 2 <= idx2 <= 10:  # CNOT-like
        i3, i4 = divmod(idx2 - 2, 3)
        layers += ["cz", (tuple(S1[i3]), tuple(S1_Y[i4]))]
    elif idx2 >= 11:  # iSWAP-like
        i3, i4 = divmod(idx2 - 11, 3)
        layers += [
            "cz", ((("y", 0.5),), (("x", -0.5),)),
            "cz", (tuple(S1_Y[i3]), tuple(S1_X[i4])),
        ]
    return CliffordElement(index=index, layers=tuple(layers))


def element_unitary(element: CliffordElement,
                    cz: np.ndarray | None = None) -> np.ndarray:
    """4x4 unitary of a token program (ideal CZ unless one is supplied)."""
    if cz is None:
        cz = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
    u = np.eye(4, dtype=complex)
    for layer in element.layers:
        if layer == "cz":
            u = cz @ u
        else:
            u = ops.kron(_single_qubit_unitary(layer[0]),
                         _single_qubit_unitary(layer[1])) @ u
    return u


@lru_cache(maxsize=1)
def clifford_unitaries() -> np.ndarray:
    """All 11520 ideal unitaries, indexed by group element. Cached."""
    table = np.empty((GROUP_ORDER, 4, 4), dtype=complex)
    for i in range(GROUP_ORDER):
        table[i] = element_unitary(generate_clifford(i))
    return table


def inverse_index(u_sequence: np.ndarray) -> int:
    """Group element undoing `u_sequence` up to global phase."""
    table = clifford_unitaries()
    overlaps = np.abs(np.einsum("nij,ji->n", table, u_sequence))
    best = int(np.argmax(overlaps))
    if overlaps[best] < 4.0 - 1e-6:
        raise ValueError("sequence unitary is not Clifford up to phase")
    return best
