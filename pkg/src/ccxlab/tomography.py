"""State and process tomography: experiment generation and reconstruction.

State tomography measures all 3^k Pauli-basis settings. Expectations for
strings with conceptual identity positions are marginalized from every
setting that covers them and averaged, then the state is assembled by
linear inversion, rho = (1/2^k) sum_P <P> P, and projected to the physical
cone (Hermitian, PSD, unit trace).

Process tomography prepares the 4^k products of {|0>, |1>, |+>, |+i>},
measures 3^k settings per preparation (12^k circuits), reconstructs each
output state by *unprojected* linear inversion, solves for the channel in
the probe-state operator basis, assembles the Choi operator, and projects
it onto the completely-positive trace-preserving set (Dykstra alternating
projections). The per-probe estimates stay unprojected on purpose:
projecting them first biases the channel estimate like a global
depolarization; unbiased probe estimates plus a single CPTP projection at
the end track the sampling-only fidelity loss. The trace-preservation
deviation of the raw estimate is reported as a diagnostic before the
projection repairs it.

Choi convention: block (m, n) of the unnormalized Choi operator holds
E(|m><n|); the normalized form divides by the dimension 2^k.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .circuits import Circuit, serialize_circuit, parse_circuit
from .errors import (
    DimensionMismatchError,
    InvalidPauliStringError,
    KOutOfRangeError,
    MissingCellError,
    MissingSettingError,
)
from .gates import GateDef, rz, sx
from .qmath import (
    check_unitary,
    dagger,
    kron_le,
    pauli_string_matrix,
    project_to_density,
    state_fidelity,
)
from .states import PROBE_LABELS, probe_state
from .synthesis import PI

CountsLike = Mapping[str, Union[int, float]]


@dataclass(frozen=True)
class TomographyJob:
    """One circuit to execute: preparation, measurement setting, shots, seed."""

    probe: Tuple[str, ...]
    setting: str
    shots: int
    seed: int

    def __post_init__(self):
        if self.shots <= 0:
            raise ValueError("shots must be positive")


def derive_seed(master_seed: int, *indices: int) -> int:
    """Stable per-task seed from a master seed and task coordinates."""
    ss = np.random.SeedSequence((int(master_seed),) + tuple(int(i) for i in indices))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def qst_settings(k: int) -> List[str]:
    """All 3^k measurement settings in lexicographic order (X < Y < Z)."""
    if not 1 <= k <= 4:
        raise KOutOfRangeError(f"k={k} outside 1..4")
    return ["".join(p) for p in itertools.product("XYZ", repeat=k)]


def measurement_rotation(setting: str) -> Circuit:
    """Native circuit rotating each qubit so a Z measurement reads the setting."""
    k = len(setting)
    if k == 0 or any(ch not in "XYZ" for ch in setting):
        raise InvalidPauliStringError(f"setting {setting!r} must be letters over X/Y/Z")
    gates: List[GateDef] = []
    for q, letter in enumerate(setting):
        if letter == "Z":
            continue
        if letter == "X":
            gates += [rz(PI / 2, q), sx(q), rz(PI / 2, q)]
        else:  # Y: S-dagger then Hadamard, merged over {RZ, SX}
            gates += [sx(q), rz(PI / 2, q)]
    return Circuit(k, tuple(gates))


def _frequencies(counts: CountsLike, k: int) -> np.ndarray:
    total = float(sum(counts.values()))
    if total <= 0:
        raise ValueError("empty counts")
    freq = np.zeros(2 ** k)
    for bits, c in counts.items():
        if len(bits) != k:
            raise ValueError(f"bitstring {bits!r} has wrong length for k={k}")
        freq[int(bits, 2)] = float(c)
    return freq / total


def _parity_signs(mask: int, k: int) -> np.ndarray:
    idx = np.arange(2 ** k)
    par = np.zeros(2 ** k, dtype=int)
    for q in range(k):
        if (mask >> q) & 1:
            par ^= (idx >> q) & 1
    return 1 - 2 * par


def pauli_expectations(data: Mapping[str, CountsLike], k: int) -> Dict[str, float]:
    """Every <P> over {I,X,Y,Z}^k, marginalizing and averaging covering settings."""
    settings = qst_settings(k)
    missing = [s for s in settings if s not in data]
    if missing:
        raise MissingSettingError(f"missing settings: {', '.join(missing)}")
    freqs = {s_: _frequencies(data[s_], k) for s_ in settings}
    expectations: Dict[str, float] = {}
    for letters in itertools.product("IXYZ", repeat=k):
        pstr = "".join(letters)
        support = [q for q in range(k) if pstr[q] != "I"]
        if not support:
            expectations[pstr] = 1.0
            continue
        mask = sum(1 << q for q in support)
        signs = _parity_signs(mask, k)
        covers = [s_ for s_ in settings if all(s_[q] == pstr[q] for q in support)]
        expectations[pstr] = float(np.mean([signs @ freqs[s_] for s_ in covers]))
    return expectations


def _linear_inversion(data: Mapping[str, CountsLike], k: int) -> np.ndarray:
    dim = 2 ** k
    rho = np.zeros((dim, dim), dtype=complex)
    for pstr, e in pauli_expectations(data, k).items():
        rho += e * pauli_string_matrix(pstr)
    return rho / dim


def qst_reconstruct(data: Mapping[str, CountsLike], k: int) -> np.ndarray:
    """Density matrix from 3^k Pauli-setting counts (linear inversion + projection)."""
    return project_to_density(_linear_inversion(data, k))


# -- process tomography ---------------------------------------------------------

def qpt_jobs(gate_circuit: Circuit, k: int, shots: int, master_seed: int) -> List[TomographyJob]:
    """The 12^k jobs (4^k probes x 3^k settings), probe-major, seeded per job."""
    if not 1 <= k <= 3:
        raise KOutOfRangeError(f"k={k} outside 1..3")
    if gate_circuit.num_qubits != k:
        raise ValueError(f"gate circuit acts on {gate_circuit.num_qubits} qubits, expected {k}")
    jobs: List[TomographyJob] = []
    index = 0
    for probe in itertools.product(PROBE_LABELS, repeat=k):
        for setting in qst_settings(k):
            jobs.append(TomographyJob(probe, setting, shots, derive_seed(master_seed, index)))
            index += 1
    return jobs


def _probe_density(probe: Sequence[str]) -> np.ndarray:
    ket = probe_state(probe)
    return np.outer(ket, ket.conj())


def choi_of_unitary(u: np.ndarray) -> np.ndarray:
    """Normalized Choi matrix of a unitary channel; rank one, unit trace."""
    u = check_unitary(np.asarray(u, dtype=complex), tol=1e-10)
    dim = u.shape[0]
    # (I (x) U) |Omega> with Omega = sum_i |ii>, input index major
    ket = np.zeros(dim * dim, dtype=complex)
    for i in range(dim):
        ket[i * dim:(i + 1) * dim] = u[:, i]
    return np.outer(ket, ket.conj()) / dim


def choi_apply(choi: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Channel action from the normalized Choi matrix."""
    d = rho.shape[0]
    blocks = (choi * d).reshape(d, d, d, d)  # [m, p, n, q] -> E(|m><n|)[p, q]
    return np.einsum("mn,mpnq->pq", rho, blocks)


def _partial_trace_out(xi: np.ndarray, d: int) -> np.ndarray:
    return np.einsum("mpnp->mn", xi.reshape(d, d, d, d))


def tp_deviation(choi: np.ndarray) -> float:
    """Max-abs deviation of Tr_out(Choi * d) from the identity."""
    d = int(round(np.sqrt(choi.shape[0])))
    return float(np.max(np.abs(_partial_trace_out(choi * d, d) - np.eye(d))))


def _clip_psd(m: np.ndarray) -> np.ndarray:
    m = (m + dagger(m)) / 2
    w, v = np.linalg.eigh(m)
    return (v * np.clip(w, 0.0, None)) @ dagger(v)


def project_to_cptp(choi: np.ndarray, iters: int = 80, tol: float = 1e-12) -> np.ndarray:
    """Dykstra alternating projections onto the PSD cone and the TP subspace."""
    d = int(round(np.sqrt(choi.shape[0])))
    x = choi * d
    correction = np.zeros_like(x)
    eye = np.eye(d)
    for _ in range(iters):
        y = _clip_psd(x + correction)
        correction = x + correction - y
        delta = _partial_trace_out(y, d) - eye
        x_new = y - np.kron(delta, eye) / d
        if np.max(np.abs(x_new - x)) < tol:
            x = x_new
            break
        x = x_new
    x = _clip_psd(x)
    return x / np.trace(x)


@dataclass(frozen=True)
class QptReconstruction:
    choi: np.ndarray
    tp_deviation_raw: float


def qpt_reconstruct_full(data: Mapping[Tuple[Tuple[str, ...], str], CountsLike],
                         k: int) -> QptReconstruction:
    if not 1 <= k <= 3:
        raise KOutOfRangeError(f"k={k} outside 1..3")
    dim = 2 ** k
    probes = list(itertools.product(PROBE_LABELS, repeat=k))
    settings = qst_settings(k)
    missing = [(p, s) for p in probes for s in settings if (p, s) not in data]
    if missing:
        preview = ", ".join(f"{'/'.join(p)}|{s}" for p, s in missing[:5])
        raise MissingCellError(f"{len(missing)} missing cells, e.g. {preview}")

    # unprojected per-probe output estimates (see module docstring)
    outputs = {}
    for probe in probes:
        per_setting = {s: data[(probe, s)] for s in settings}
        outputs[probe] = _linear_inversion(per_setting, k)

    basis = np.zeros((dim * dim, len(probes)), dtype=complex)
    images = np.zeros((dim * dim, len(probes)), dtype=complex)
    for idx, probe in enumerate(probes):
        basis[:, idx] = _probe_density(probe).reshape(-1)
        images[:, idx] = outputs[probe].reshape(-1)
    superop = images @ np.linalg.inv(basis)  # row-major vec convention

    xi = np.zeros((dim * dim, dim * dim), dtype=complex)
    unit = np.zeros((dim, dim), dtype=complex)
    for m in range(dim):
        for n in range(dim):
            unit[:] = 0.0
            unit[m, n] = 1.0
            xi[m * dim:(m + 1) * dim, n * dim:(n + 1) * dim] = \
                (superop @ unit.reshape(-1)).reshape(dim, dim)
    sigma_raw = xi / dim
    deviation = tp_deviation(sigma_raw)
    return QptReconstruction(project_to_cptp(sigma_raw), deviation)


def qpt_reconstruct(data: Mapping[Tuple[Tuple[str, ...], str], CountsLike], k: int) -> np.ndarray:
    return qpt_reconstruct_full(data, k).choi


# -- fidelity metrics ------------------------------------------------------------

def process_fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """State fidelity between two normalized Choi matrices."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"Choi shapes differ: {a.shape} vs {b.shape}")
    return state_fidelity(a, b)


def average_gate_fidelity(f_pro: float, k: int) -> float:
    """(Gamma * F_pro + 1) / (Gamma + 1) with Gamma = 2^k."""
    if not 0.0 <= f_pro <= 1.0:
        raise ValueError(f"process fidelity {f_pro} outside [0, 1]")
    gamma = 2 ** k
    return (gamma * f_pro + 1.0) / (gamma + 1.0)


def _normalized_paulis(k: int) -> List[np.ndarray]:
    gamma = 2 ** k
    return [pauli_string_matrix("".join(p)) / np.sqrt(gamma)
            for p in itertools.product("IXYZ", repeat=k)]


def choi_to_superop_pauli(choi: np.ndarray) -> np.ndarray:
    """Transfer matrix in the normalized Pauli basis, S[i,j] = Tr(P_i E(P_j))."""
    d = int(round(np.sqrt(choi.shape[0])))
    k = int(round(np.log2(d)))
    paulis = _normalized_paulis(k)
    s = np.zeros((d * d, d * d), dtype=complex)
    for j, pj in enumerate(paulis):
        image = choi_apply(choi, pj)
        for i, pi in enumerate(paulis):
            s[i, j] = np.trace(dagger(pi) @ image)
    return s


def unitary_to_superop_pauli(u: np.ndarray) -> np.ndarray:
    u = check_unitary(np.asarray(u, dtype=complex), tol=1e-10)
    d = u.shape[0]
    k = int(round(np.log2(d)))
    paulis = _normalized_paulis(k)
    s = np.zeros((d * d, d * d), dtype=complex)
    for j, pj in enumerate(paulis):
        image = u @ pj @ dagger(u)
        for i, pi in enumerate(paulis):
            s[i, j] = np.trace(dagger(pi) @ image)
    return s


def process_fidelity_superop(channel_superop: np.ndarray, target_unitary: np.ndarray) -> float:
    """Tr(S_target^dag S_channel) / Gamma^2; the superoperator-path cross-check."""
    s_chan = np.asarray(channel_superop, dtype=complex)
    s_tgt = unitary_to_superop_pauli(target_unitary)
    if s_chan.shape != s_tgt.shape:
        raise DimensionMismatchError(f"superoperator shapes differ: {s_chan.shape} vs {s_tgt.shape}")
    gamma_sq = s_chan.shape[0]
    return float(np.real(np.trace(dagger(s_tgt) @ s_chan)) / gamma_sq)


def kraus_to_choi(operators: Iterable[np.ndarray]) -> np.ndarray:
    """Normalized Choi matrix of an operator-sum channel (testing utility)."""
    ops = [np.asarray(kk, dtype=complex) for kk in operators]
    d = ops[0].shape[0]
    xi = np.zeros((d * d, d * d), dtype=complex)
    unit = np.zeros((d, d), dtype=complex)
    for m in range(d):
        for n in range(d):
            unit[:] = 0.0
            unit[m, n] = 1.0
            image = sum(kk @ unit @ dagger(kk) for kk in ops)
            xi[m * d:(m + 1) * d, n * d:(n + 1) * d] = image
    return xi / d


# -- dataset files ----------------------------------------------------------------

DATASET_SCHEMA_VERSION = 1


def dataset_to_dict(kind: str, k: int, shots: int, master_seed: int,
                    gate_circuit: Optional[Circuit],
                    data: Mapping, per_setting: bool) -> dict:
    if per_setting:
        encoded = {setting: dict(counts) for setting, counts in data.items()}
    else:
        encoded = {f"{','.join(probe)}|{setting}": dict(counts)
                   for (probe, setting), counts in data.items()}
    return {
        "schema_version": DATASET_SCHEMA_VERSION,
        "kind": kind,
        "k": k,
        "shots": shots,
        "master_seed": master_seed,
        "gate_circuit": serialize_circuit(gate_circuit) if gate_circuit is not None else None,
        "data": encoded,
    }


def dataset_from_dict(payload: Mapping) -> Tuple[str, int, dict, Optional[Circuit]]:
    kind = payload["kind"]
    k = int(payload["k"])
    circ = parse_circuit(payload["gate_circuit"]) if payload.get("gate_circuit") else None
    raw = payload["data"]
    if kind == "qst":
        data = {setting: counts for setting, counts in raw.items()}
    else:
        data = {}
        for key, counts in raw.items():
            probe_part, setting = key.split("|")
            data[(tuple(probe_part.split(",")), setting)] = counts
    return kind, k, data, circ
