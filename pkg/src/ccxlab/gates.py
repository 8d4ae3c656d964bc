"""Gate catalog: names, arities, and unitary matrices.

Multi-qubit gate matrices are expressed on the gate's own wires *sorted
ascending*, little-endian (the smallest wire index is the least-significant
bit). The role of each wire (control/target) comes from the order of the
``GateDef.qubits`` tuple, so ``cnot(0, 1)`` and ``cnot(1, 0)`` produce
different 4x4 matrices on the same wire pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Tuple

import numpy as np

from .errors import UnknownGateError
from .qmath import I2, X as _X

_SQ2 = 1 / math.sqrt(2)

MAT_X = _X
MAT_SX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex)
MAT_H = _SQ2 * np.array([[1, 1], [1, -1]], dtype=complex)
MAT_T = np.diag([1, np.exp(1j * math.pi / 4)]).astype(complex)
MAT_TDG = MAT_T.conj().T
MAT_S = np.diag([1, 1j]).astype(complex)
MAT_SDG = MAT_S.conj().T

# echoed cross-resonance, control on the lower wire index
MAT_ECR_ASC = np.array([
    [0, _SQ2, 0, 1j * _SQ2],
    [_SQ2, 0, -1j * _SQ2, 0],
    [0, 1j * _SQ2, 0, _SQ2],
    [-1j * _SQ2, 0, _SQ2, 0],
], dtype=complex)
# control on the higher wire index
MAT_ECR_DESC = np.array([
    [0, 0, _SQ2, 1j * _SQ2],
    [0, 0, 1j * _SQ2, _SQ2],
    [_SQ2, -1j * _SQ2, 0, 0],
    [-1j * _SQ2, _SQ2, 0, 0],
], dtype=complex)


class Gate(str, Enum):
    X = "X"
    SX = "SX"
    RZ = "RZ"
    H = "H"
    T = "T"
    TDG = "TDG"
    S = "S"
    SDG = "SDG"
    ID = "ID"
    CNOT = "CNOT"
    ECR = "ECR"
    CCX = "CCX"


GATE_ARITY = {
    Gate.X: 1, Gate.SX: 1, Gate.RZ: 1, Gate.H: 1, Gate.T: 1, Gate.TDG: 1,
    Gate.S: 1, Gate.SDG: 1, Gate.ID: 1, Gate.CNOT: 2, Gate.ECR: 2, Gate.CCX: 3,
}
GATE_PARAM_COUNT = {name: (1 if name is Gate.RZ else 0) for name in Gate}

#: the gate set executable on the target devices
NATIVE_GATES = frozenset({Gate.ECR, Gate.ID, Gate.RZ, Gate.SX, Gate.X})


@dataclass(frozen=True)
class GateDef:
    """One gate application: name, wires (role order), and real parameters."""

    name: Gate
    qubits: Tuple[int, ...]
    params: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        if not isinstance(self.name, Gate):
            raise UnknownGateError(f"unknown gate {self.name!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        arity = GATE_ARITY[self.name]
        if len(self.qubits) != arity:
            raise ValueError(f"{self.name.value} takes {arity} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.name.value} qubit indices must be distinct: {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValueError(f"negative qubit index in {self.qubits}")
        nparams = GATE_PARAM_COUNT[self.name]
        if len(self.params) != nparams:
            raise ValueError(f"{self.name.value} takes {nparams} parameter(s), got {self.params}")


# readable constructors -------------------------------------------------------

def x(q: int) -> GateDef:
    return GateDef(Gate.X, (q,))


def sx(q: int) -> GateDef:
    return GateDef(Gate.SX, (q,))


def rz(theta: float, q: int) -> GateDef:
    return GateDef(Gate.RZ, (q,), (theta,))


def h(q: int) -> GateDef:
    return GateDef(Gate.H, (q,))


def t(q: int) -> GateDef:
    return GateDef(Gate.T, (q,))


def tdg(q: int) -> GateDef:
    return GateDef(Gate.TDG, (q,))


def s(q: int) -> GateDef:
    return GateDef(Gate.S, (q,))


def sdg(q: int) -> GateDef:
    return GateDef(Gate.SDG, (q,))


def idle(q: int) -> GateDef:
    return GateDef(Gate.ID, (q,))


def cnot(control: int, target: int) -> GateDef:
    return GateDef(Gate.CNOT, (control, target))


def ecr(control: int, target: int) -> GateDef:
    return GateDef(Gate.ECR, (control, target))


def ccx(control1: int, control2: int, target: int) -> GateDef:
    return GateDef(Gate.CCX, (control1, control2, target))


def _permutation_matrix(k: int, control_positions, target_position) -> np.ndarray:
    """Classical controlled-X on k local wires (positions in sorted order)."""
    dim = 2 ** k
    m = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        j = i
        if all((i >> p) & 1 for p in control_positions):
            j = i ^ (1 << target_position)
        m[j, i] = 1.0
    return m


def gate_matrix(g: GateDef) -> np.ndarray:
    """Unitary of ``g`` on its own wires, sorted ascending, little-endian."""
    if g.name is Gate.X:
        return MAT_X.copy()
    if g.name is Gate.SX:
        return MAT_SX.copy()
    if g.name is Gate.H:
        return MAT_H.copy()
    if g.name is Gate.T:
        return MAT_T.copy()
    if g.name is Gate.TDG:
        return MAT_TDG.copy()
    if g.name is Gate.S:
        return MAT_S.copy()
    if g.name is Gate.SDG:
        return MAT_SDG.copy()
    if g.name is Gate.ID:
        return I2.copy()
    if g.name is Gate.RZ:
        theta = g.params[0]
        return np.diag([np.exp(-1j * theta / 2), np.exp(1j * theta / 2)]).astype(complex)
    if g.name is Gate.CNOT:
        control, target = g.qubits
        order = sorted(g.qubits)
        return _permutation_matrix(2, (order.index(control),), order.index(target))
    if g.name is Gate.ECR:
        control, target = g.qubits
        return MAT_ECR_ASC.copy() if control < target else MAT_ECR_DESC.copy()
    if g.name is Gate.CCX:
        c1, c2, target = g.qubits
        order = sorted(g.qubits)
        return _permutation_matrix(3, (order.index(c1), order.index(c2)), order.index(target))
    raise UnknownGateError(f"no matrix for gate {g.name!r}")
