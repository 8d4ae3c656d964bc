"""Calibration-driven noise: Kraus channels and the device noise model.

Channel placement convention (documented, deterministic): for every gate the
simulator applies the ideal unitary, then a depolarizing channel sized by the
gate's average error rate on the gate's own qubits, then thermal relaxation
on each participating qubit for the gate's duration. RZ is a virtual frame
update and acquires no noise. Idle qubits do not relax (no scheduling model).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from .errors import (
    CoherenceViolation,
    ErrTooLargeError,
    InvalidCoherenceError,
    MissingCalibrationError,
)
from .gates import Gate
from .qmath import I2, PAULI_1Q, dagger, kron_le

#: fallback durations (ns) when a calibration file does not provide them
DEFAULT_GATE_DURATIONS_NS = {"ECR": 533.0, "SX": 57.0, "X": 57.0, "RZ": 0.0, "ID": 0.0}


@dataclass(frozen=True)
class KrausChannel:
    """Operator-sum map; operators must resolve the identity within 1e-8."""

    operators: Tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=complex) for k in self.operators)
        object.__setattr__(self, "operators", ops)
        dim = ops[0].shape[0]
        total = sum(dagger(k) @ k for k in ops)
        dev = np.max(np.abs(total - np.eye(dim)))
        if dev > 1e-8:
            raise ValueError(f"Kraus operators are not trace preserving (dev {dev:.3e})")

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return sum(k @ rho @ dagger(k) for k in self.operators)


def thermal_relaxation_channel(duration_ns: float, t1_us: float, t2_us: float) -> KrausChannel:
    """Amplitude damping for T1 composed with pure dephasing for T2.

    gamma = 1 - exp(-t/T1); the pure dephasing rate is 1/T2 - 1/(2 T1).
    """
    if duration_ns < 0:
        raise ValueError("duration must be nonnegative")
    if not (0 < t2_us <= 2 * t1_us) and not (math.isinf(t1_us) and math.isinf(t2_us)):
        raise InvalidCoherenceError(f"need 0 < T2 <= 2*T1, got T1={t1_us}, T2={t2_us}")
    t_us = duration_ns / 1000.0
    gamma = 1.0 - math.exp(-t_us / t1_us) if not math.isinf(t1_us) else 0.0
    rate_phi = (1.0 / t2_us if not math.isinf(t2_us) else 0.0) \
        - (0.5 / t1_us if not math.isinf(t1_us) else 0.0)
    rate_phi = max(rate_phi, 0.0)
    p_z = (1.0 - math.exp(-t_us * rate_phi)) / 2.0

    ad = [np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=complex),
          np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex)]
    deph = [math.sqrt(1 - p_z) * I2, math.sqrt(p_z) * PAULI_1Q["Z"]]
    ops = [a @ d for a in ad for d in deph]
    ops = [k for k in ops if np.max(np.abs(k)) > 1e-16] or [I2.copy()]
    return KrausChannel(tuple(ops))


def depolarizing_channel(err: float, dim: int) -> KrausChannel:
    """Depolarizing channel whose average gate fidelity equals 1 - err.

    E(rho) = (1-lam) rho + lam I/dim with lam = err * dim / (dim - 1).
    """
    if err < 0:
        raise ValueError("error rate must be nonnegative")
    if err >= 1 - 1 / dim:
        raise ErrTooLargeError(f"err {err} >= 1 - 1/dim for dim {dim}")
    lam = err * dim / (dim - 1)
    k = int(round(math.log2(dim)))
    if 2 ** k != dim:
        raise ValueError("dim must be a power of two")
    if lam == 0.0:
        return KrausChannel((np.eye(dim, dtype=complex),))
    d2 = dim * dim
    ops = [math.sqrt(1 - lam * (d2 - 1) / d2) * np.eye(dim, dtype=complex)]
    for letters in product("IXYZ", repeat=k):
        if all(c == "I" for c in letters):
            continue
        p = kron_le([PAULI_1Q[c] for c in letters])
        ops.append(math.sqrt(lam) / dim * p)
    return KrausChannel(tuple(ops))


@dataclass(frozen=True)
class QubitCalibration:
    t1_us: float
    t2_us: float
    frequency_ghz: float = 0.0
    anharmonicity_ghz: float = 0.0
    prob_meas0_prep1: float = 0.0
    prob_meas1_prep0: float = 0.0
    readout_error: float = 0.0
    readout_length_ns: float = 0.0

    def __post_init__(self):
        if not (self.t1_us > 0 and 0 < self.t2_us <= 2 * self.t1_us):
            raise CoherenceViolation(
                f"need 0 < T2 <= 2*T1, got T1={self.t1_us} us, T2={self.t2_us} us")
        for name in ("prob_meas0_prep1", "prob_meas1_prep0", "readout_error"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if self.readout_length_ns < 0:
            raise ValueError("readout_length_ns must be nonnegative")


@dataclass(frozen=True)
class NoiseModel:
    """Per-qubit relaxation/readout data plus per-gate error and duration."""

    qubit_cal: Tuple[QubitCalibration, ...]
    gate_error: Mapping[str, float] = field(default_factory=dict)
    gate_duration: Mapping[str, float] = field(default_factory=dict)
    rz_is_virtual: bool = True

    def __post_init__(self):
        object.__setattr__(self, "gate_error", dict(self.gate_error))
        object.__setattr__(self, "gate_duration", dict(self.gate_duration))
        for name, v in self.gate_error.items():
            if not 0.0 <= v < 1.0:
                raise ValueError(f"gate error {name}={v} outside [0, 1)")
        for name, v in self.gate_duration.items():
            if v < 0:
                raise ValueError(f"gate duration {name}={v} negative")
        if self.gate_error.get("RZ", 0.0) != 0.0 or self.gate_duration.get("RZ", 0.0) != 0.0:
            raise ValueError("RZ is virtual: zero duration and zero error")

    @property
    def num_qubits(self) -> int:
        return len(self.qubit_cal)

    def calibration(self, qubit: int) -> QubitCalibration:
        if qubit >= len(self.qubit_cal):
            raise MissingCalibrationError(f"no calibration for qubit {qubit}")
        return self.qubit_cal[qubit]

    def error_for(self, gate: Gate | str) -> float:
        name = gate.value if isinstance(gate, Gate) else gate
        if name == "RZ":
            return 0.0
        return float(self.gate_error.get(name, 0.0))

    def duration_for(self, gate: Gate | str) -> float:
        name = gate.value if isinstance(gate, Gate) else gate
        if name == "RZ":
            return 0.0
        if name in self.gate_duration:
            return float(self.gate_duration[name])
        return DEFAULT_GATE_DURATIONS_NS.get(name, 0.0)

    def readout_confusions(self) -> Tuple[Tuple[float, float], ...]:
        """(P(1|0), P(0|1)) per qubit, feeding the confusion matrices."""
        return tuple((c.prob_meas1_prep0, c.prob_meas0_prep1) for c in self.qubit_cal)

    @staticmethod
    def noiseless(num_qubits: int) -> "NoiseModel":
        cal = QubitCalibration(t1_us=math.inf, t2_us=math.inf)
        return NoiseModel(tuple([cal] * num_qubits), {}, dict(DEFAULT_GATE_DURATIONS_NS))


def scale_noise_model(nm: NoiseModel, factor: float) -> NoiseModel:
    """Scale all error rates and the relaxation rates 1/T1, 1/T2 by ``factor``.

    ``factor=0`` yields a noiseless model; ``factor>1`` degrades everything.
    """
    if factor < 0:
        raise ValueError("scale factor must be nonnegative")

    def scale_time(t_us: float) -> float:
        if factor == 0.0:
            return math.inf
        return t_us / factor if not math.isinf(t_us) else math.inf

    def scale_prob(p: float) -> float:
        return min(p * factor, 1.0)

    cal = tuple(
        QubitCalibration(
            t1_us=scale_time(c.t1_us),
            t2_us=scale_time(c.t2_us),
            frequency_ghz=c.frequency_ghz,
            anharmonicity_ghz=c.anharmonicity_ghz,
            prob_meas0_prep1=scale_prob(c.prob_meas0_prep1),
            prob_meas1_prep0=scale_prob(c.prob_meas1_prep0),
            readout_error=scale_prob(c.readout_error),
            readout_length_ns=c.readout_length_ns,
        )
        for c in nm.qubit_cal
    )
    errors = {name: v * factor for name, v in nm.gate_error.items()}
    for name, v in errors.items():
        if v >= 1.0:
            raise ErrTooLargeError(f"scaled gate error {name}={v} >= 1")
    return NoiseModel(cal, errors, dict(nm.gate_duration), nm.rz_is_virtual)
