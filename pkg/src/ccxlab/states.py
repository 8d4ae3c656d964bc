"""Benchmark input states and tomography probe preparations.

All builders emit circuits over the native gate set only, so they run on
either simulator backend unchanged. A leading RZ on a wire still in |0> is
prepended to cancel the global phase accumulated by the RZ/SX rewrites;
the produced state then matches the target amplitudes exactly, not merely
up to phase.
"""

from __future__ import annotations

import cmath
import math
from enum import Enum
from typing import List, Sequence

import numpy as np

from .circuits import Circuit, apply_gate_statevector
from .errors import InvalidLabelError
from .gates import GateDef, rz, x
from .synthesis import cnot_to_ecr, native_h, native_ry, peephole_merge

PI = math.pi

PROBE_LABELS = ("0", "1", "+", "+i")

_PROBE_KETS = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([1, 1], dtype=complex) / math.sqrt(2),
    "+i": np.array([1, 1j], dtype=complex) / math.sqrt(2),
}


class StateKind(str, Enum):
    GHZ = "GHZ"
    W = "W"
    UNIFORM = "UNIFORM"
    BASIS = "BASIS"
    PROBE = "PROBE"


# -- analytic targets ----------------------------------------------------------

def ghz_state() -> np.ndarray:
    v = np.zeros(8, dtype=complex)
    v[0] = v[7] = 1 / math.sqrt(2)
    return v


def w_state() -> np.ndarray:
    v = np.zeros(8, dtype=complex)
    v[1] = v[2] = v[4] = 1 / math.sqrt(3)
    return v


def uniform_state() -> np.ndarray:
    return np.full(8, 1 / math.sqrt(8), dtype=complex)


def basis_state(index: int, num_qubits: int = 3) -> np.ndarray:
    v = np.zeros(2 ** num_qubits, dtype=complex)
    v[index] = 1.0
    return v


def probe_ket(label: str) -> np.ndarray:
    if label not in _PROBE_KETS:
        raise InvalidLabelError(f"probe label {label!r} not in {PROBE_LABELS}")
    return _PROBE_KETS[label].copy()


def probe_state(labels: Sequence[str]) -> np.ndarray:
    """Product state of per-qubit probes, labels[0] on qubit 0."""
    out = np.array([1.0 + 0j])
    for lab in reversed(list(labels)):
        out = np.kron(out, probe_ket(lab))
    return out


# -- circuit builders ----------------------------------------------------------

def _simulate(circuit: Circuit) -> np.ndarray:
    psi = basis_state(0, circuit.num_qubits)
    for g in circuit.gates:
        psi = apply_gate_statevector(psi, g, circuit.num_qubits)
    return psi


def _fix_global_phase(circuit: Circuit, target: np.ndarray) -> Circuit:
    """Prepend RZ(2*delta) on qubit 0 (still |0>) to cancel the phase delta."""
    psi = _simulate(circuit)
    overlap = np.vdot(target, psi)
    if abs(abs(overlap) - 1.0) > 1e-9:
        raise AssertionError("state builder does not reach its target state")
    delta = cmath.phase(overlap)
    if abs(delta) < 1e-14:
        return circuit
    fixed = Circuit(circuit.num_qubits, (rz(2 * delta, 0),) + circuit.gates)
    return fixed


def ghz_circuit() -> Circuit:
    gates: List[GateDef] = []
    gates += native_h(0)
    gates += cnot_to_ecr(0, 1).gates
    gates += cnot_to_ecr(1, 2).gates
    c = peephole_merge(Circuit(3, tuple(gates)))
    return _fix_global_phase(c, ghz_state())


def w_circuit() -> Circuit:
    """Split amplitude 1/sqrt(3) onto qubit 2, a Bell-like pair on (1, 0)."""
    theta = 2 * math.acos(math.sqrt(2.0 / 3.0))
    gates: List[GateDef] = []
    gates += native_ry(theta, 2)
    # rotate qubit 1 by pi/2 only when qubit 2 is |0>: X-conjugated controlled-RY
    gates += [x(2)]
    gates += native_ry(PI / 4, 1)
    gates += cnot_to_ecr(2, 1).gates
    gates += native_ry(-PI / 4, 1)
    gates += cnot_to_ecr(2, 1).gates
    gates += [x(2)]
    gates += cnot_to_ecr(1, 0).gates
    gates += cnot_to_ecr(2, 0).gates
    gates += [x(0)]
    c = peephole_merge(Circuit(3, tuple(gates)))
    return _fix_global_phase(c, w_state())


def uniform_circuit() -> Circuit:
    gates: List[GateDef] = []
    for q in range(3):
        gates += native_h(q)
    c = peephole_merge(Circuit(3, tuple(gates)))
    return _fix_global_phase(c, uniform_state())


def basis_circuit(index: int, num_qubits: int = 3) -> Circuit:
    gates = tuple(x(q) for q in range(num_qubits) if (index >> q) & 1)
    return Circuit(num_qubits, gates)


def probe_circuit(labels: Sequence[str]) -> Circuit:
    labels = list(labels)
    gates: List[GateDef] = []
    for q, lab in enumerate(labels):
        if lab == "0":
            continue
        elif lab == "1":
            gates.append(x(q))
        elif lab == "+":
            gates += native_h(q)
        elif lab == "+i":
            # |+i> = S H |0>; the trailing RZ folds into the H rewrite
            gates += native_h(q)
            gates.append(rz(PI / 2, q))
        else:
            raise InvalidLabelError(f"probe label {lab!r} not in {PROBE_LABELS}")
    c = peephole_merge(Circuit(len(labels), tuple(gates)))
    return _fix_global_phase(c, probe_state(labels))


def prepare_state(kind: StateKind | str, *, basis_index: int = 0,
                  probe: Sequence[str] | None = None) -> Circuit:
    """Dispatcher used by experiment configs and the CLI."""
    kind = StateKind(kind)
    if kind is StateKind.GHZ:
        return ghz_circuit()
    if kind is StateKind.W:
        return w_circuit()
    if kind is StateKind.UNIFORM:
        return uniform_circuit()
    if kind is StateKind.BASIS:
        return basis_circuit(basis_index)
    if kind is StateKind.PROBE:
        if probe is None:
            raise InvalidLabelError("PROBE preparation needs per-qubit labels")
        return probe_circuit(probe)
    raise InvalidLabelError(f"unknown state kind {kind!r}")


def target_state(kind: StateKind | str, *, basis_index: int = 0,
                 probe: Sequence[str] | None = None) -> np.ndarray:
    kind = StateKind(kind)
    if kind is StateKind.GHZ:
        return ghz_state()
    if kind is StateKind.W:
        return w_state()
    if kind is StateKind.UNIFORM:
        return uniform_state()
    if kind is StateKind.BASIS:
        return basis_state(basis_index)
    if kind is StateKind.PROBE:
        if probe is None:
            raise InvalidLabelError("PROBE target needs per-qubit labels")
        return probe_state(probe)
    raise InvalidLabelError(f"unknown state kind {kind!r}")
