import math

import numpy as np
import pytest

from ccxlab.circuits import Circuit
from ccxlab.errors import NonNativeGateError
from ccxlab.gates import ccx, cnot, ecr, h, rz, sx, x
from ccxlab.noise import NoiseModel, QubitCalibration
from ccxlab.qmath import state_fidelity
from ccxlab.simulator import (
    CountsMap,
    apply_readout_confusion,
    exact_counts,
    measurement_probabilities,
    run_density,
    run_statevector,
    sample_counts,
)
from ccxlab.states import basis_circuit, ghz_circuit, uniform_state
from ccxlab.synthesis import DecompositionStrategy, decompose_toffoli, native_h

from conftest import random_state_vector


def _toffoli_native():
    return decompose_toffoli(DecompositionStrategy.ECR_NATIVE, (0, 1), 2)


def _noise_model(ecr_err=0.00756, sx_err=0.000236, t1=272.21, t2=188.10,
                 p10=0.0, p01=0.0, readout_len=0.0):
    cal = QubitCalibration(t1_us=t1, t2_us=t2, prob_meas1_prep0=p10,
                           prob_meas0_prep1=p01, readout_length_ns=readout_len)
    return NoiseModel((cal,) * 3, {"ECR": ecr_err, "SX": sx_err, "X": sx_err},
                      {"ECR": 533.0, "SX": 57.0, "X": 57.0})


def test_empty_circuit_gives_ground_state():
    psi = run_statevector(Circuit(3))
    assert psi[0] == 1.0 and np.allclose(psi[1:], 0.0)


def test_native_toffoli_truth_table():
    circ = _toffoli_native()
    # |110> in role order (both controls set, target clear) = basis index 3
    full = basis_circuit(3).concat(circ)
    psi = run_statevector(full)
    assert abs(psi[7]) == pytest.approx(1.0, abs=1e-10)
    # |010> (only control 1 set) = basis index 2 stays put
    full = basis_circuit(2).concat(circ)
    psi = run_statevector(full)
    assert abs(psi[2]) == pytest.approx(1.0, abs=1e-10)


def test_native_hadamards_give_uniform_state():
    gates = tuple(g for q in range(3) for g in native_h(q))
    psi = run_statevector(Circuit(3, gates))
    assert np.max(np.abs(np.abs(psi) - 1 / math.sqrt(8))) < 1e-10
    rho = np.outer(psi, psi.conj())
    target = np.outer(uniform_state(), uniform_state().conj())
    assert state_fidelity(rho, target) == pytest.approx(1.0, abs=1e-10)


def test_non_native_gates_rejected():
    for gate in (cnot(0, 1), ccx(0, 1, 2), h(0)):
        with pytest.raises(NonNativeGateError):
            run_statevector(Circuit(3, (gate,)))
    with pytest.raises(NonNativeGateError):
        run_density(Circuit(2, (h(0),)), None)


def test_density_at_zero_noise_matches_statevector(rng):
    for _ in range(50):
        gates = []
        for _ in range(rng.integers(1, 12)):
            kind = rng.integers(0, 4)
            q = int(rng.integers(0, 3))
            if kind == 0:
                gates.append(sx(q))
            elif kind == 1:
                gates.append(x(q))
            elif kind == 2:
                gates.append(rz(float(rng.uniform(-3, 3)), q))
            else:
                q2 = int((q + 1) % 3)
                gates.append(ecr(q, q2))
        circ = Circuit(3, tuple(gates))
        psi = run_statevector(circ)
        rho = run_density(circ, None)
        assert state_fidelity(rho, np.outer(psi, psi.conj())) > 1 - 1e-9


def test_noisy_toffoli_on_ghz_degrades():
    circ = ghz_circuit().concat(_toffoli_native())
    rho = run_density(circ, _noise_model())
    psi = run_statevector(circ)
    fid = state_fidelity(rho, np.outer(psi, psi.conj()))
    assert fid < 1.0
    assert fid > 0.5
    purity = float(np.real(np.trace(rho @ rho)))
    assert purity < 1.0


def test_purity_bounded():
    circ = ghz_circuit()
    rho = run_density(circ, None)
    assert np.real(np.trace(rho @ rho)) == pytest.approx(1.0, abs=1e-10)
    rho = run_density(circ, _noise_model())
    assert np.real(np.trace(rho @ rho)) <= 1.0 + 1e-10


# -- sampling ----------------------------------------------------------------------

def test_ground_state_z_sampling_deterministic_outcome():
    counts = sample_counts(run_statevector(Circuit(1)), "Z", 1000, seed=3)
    assert counts.outcomes == {"0": 1000}


def test_sampling_seed_determinism():
    psi = run_statevector(ghz_circuit())
    a = sample_counts(psi, "XYZ", 5000, seed=42)
    b = sample_counts(psi, "XYZ", 5000, seed=42)
    assert a == b
    c = sample_counts(psi, "XYZ", 5000, seed=43)
    assert a != c


def test_ghz_zzz_binomial_band():
    psi = run_statevector(ghz_circuit())
    counts = sample_counts(psi, "ZZZ", 19000, seed=11)
    assert set(counts.outcomes) <= {"000", "111"}
    sigma = math.sqrt(19000 * 0.25)
    assert abs(counts.outcomes["000"] - 9500) < 4 * sigma


def test_readout_confusion_flip_rate():
    psi = run_statevector(Circuit(1))
    counts = sample_counts(psi, "Z", 20000, seed=5, readout=[(0.1, 0.0)])
    frac_one = counts.outcomes.get("1", 0) / 20000
    sigma = math.sqrt(0.1 * 0.9 / 20000)
    assert abs(frac_one - 0.1) < 4 * sigma


def test_readout_confusion_matrix_is_columnwise():
    probs = np.array([1.0, 0.0, 0.0, 0.0])
    mixed = apply_readout_confusion(probs, [(0.2, 0.0), (0.0, 0.0)])
    # qubit 0 misreads 1 with prob 0.2: outcome index 1 gains that weight
    assert mixed[1] == pytest.approx(0.2)
    assert mixed[0] == pytest.approx(0.8)


def test_empirical_tvd_convergence(rng):
    shots = 4096
    bound = 5 * math.sqrt(8 / shots)
    failures = 0
    psi = random_state_vector(8, np.random.default_rng(0))
    probs = measurement_probabilities(psi, "XYZ")
    for seed in range(100):
        counts = sample_counts(psi, "XYZ", shots, seed=seed)
        emp = np.zeros(8)
        for bits, c in counts.outcomes.items():
            emp[int(bits, 2)] = c / shots
        tvd = 0.5 * np.sum(np.abs(emp - probs))
        if tvd > bound:
            failures += 1
    assert failures <= 1  # 99% of seeded runs inside the bound


def test_exact_counts_match_probabilities():
    psi = run_statevector(ghz_circuit())
    exact = exact_counts(psi, "ZZZ")
    assert exact == {"000": pytest.approx(0.5), "111": pytest.approx(0.5)}


def test_density_sampling_matches_statevector_sampling():
    circ = ghz_circuit()
    psi = run_statevector(circ)
    rho = run_density(circ, None)
    a = sample_counts(psi, "XXZ", 2000, seed=9)
    b = sample_counts(rho, "XXZ", 2000, seed=9)
    assert a == b


def test_counts_map_validation():
    with pytest.raises(ValueError):
        CountsMap({"00": 5}, shots=6)
    with pytest.raises(ValueError):
        CountsMap({"00": 5, "1": 1}, shots=6)
    with pytest.raises(ValueError):
        CountsMap({}, shots=0)
