import itertools
import json
import math

import numpy as np
import pytest

from ccxlab.circuits import Circuit, circuit_unitary
from ccxlab.errors import (
    KOutOfRangeError,
    MissingCellError,
    MissingSettingError,
    NotUnitaryError,
)
from ccxlab.gates import rz, sx
from ccxlab.qmath import check_density_matrix, kron_le, state_fidelity
from ccxlab.simulator import exact_counts, measurement_probabilities, run_statevector, sample_counts
from ccxlab.states import PROBE_LABELS, ghz_circuit, probe_state
from ccxlab.synthesis import DecompositionStrategy, decompose_toffoli, toffoli_unitary
from ccxlab.tomography import (
    TomographyJob,
    average_gate_fidelity,
    choi_apply,
    choi_of_unitary,
    choi_to_superop_pauli,
    dataset_from_dict,
    dataset_to_dict,
    derive_seed,
    kraus_to_choi,
    measurement_rotation,
    process_fidelity,
    process_fidelity_superop,
    project_to_cptp,
    qpt_jobs,
    qpt_reconstruct,
    qpt_reconstruct_full,
    qst_reconstruct,
    qst_settings,
    tp_deviation,
    unitary_to_superop_pauli,
)

from conftest import random_cptp_kraus, random_state_vector, random_unitary


def _exact_qst_data(state, k):
    return {s: exact_counts(state, s) for s in qst_settings(k)}


def _exact_qpt_data(u, k):
    data = {}
    for probe in itertools.product(PROBE_LABELS, repeat=k):
        psi = u @ probe_state(probe)
        for setting in qst_settings(k):
            data[(probe, setting)] = exact_counts(psi, setting)
    return data


# -- settings and rotations -------------------------------------------------------

def test_settings_one_qubit():
    assert qst_settings(1) == ["X", "Y", "Z"]


def test_settings_three_qubits():
    settings = qst_settings(3)
    assert len(settings) == 27
    assert settings[0] == "XXX"
    assert settings[-1] == "ZZZ"
    assert len(set(settings)) == 27
    assert settings == sorted(settings)


def test_settings_k_out_of_range():
    with pytest.raises(KOutOfRangeError):
        qst_settings(0)
    with pytest.raises(KOutOfRangeError):
        qst_settings(5)


def test_z_rotation_is_empty():
    assert measurement_rotation("ZZZ").gates == ()


def test_x_rotation_maps_plus_to_zero():
    circ = measurement_rotation("X")
    u = circuit_unitary(circ)
    plus = np.array([1, 1], dtype=complex) / math.sqrt(2)
    assert abs((u @ plus)[0]) == pytest.approx(1.0, abs=1e-10)


def test_y_rotation_maps_plus_i_to_zero():
    circ = measurement_rotation("Y")
    u = circuit_unitary(circ)
    plus_i = np.array([1, 1j], dtype=complex) / math.sqrt(2)
    assert abs((u @ plus_i)[0]) == pytest.approx(1.0, abs=1e-10)


def test_rotation_circuits_agree_with_exact_probabilities(rng):
    psi = random_state_vector(8, rng)
    for setting in ("XYZ", "YYX", "ZXY"):
        circ = measurement_rotation(setting)
        rotated = circuit_unitary(circ) @ psi
        probs_circ = np.abs(rotated) ** 2
        probs_exact = measurement_probabilities(psi, setting)
        assert np.max(np.abs(probs_circ - probs_exact)) < 1e-10


# -- state tomography --------------------------------------------------------------

def test_qst_ground_state_exact():
    psi = np.zeros(8, dtype=complex)
    psi[0] = 1.0
    rho = qst_reconstruct(_exact_qst_data(psi, 3), 3)
    assert state_fidelity(rho, np.outer(psi, psi.conj())) > 1 - 1e-9


def test_qst_toffoli_ghz_output_exact():
    circ = ghz_circuit().concat(decompose_toffoli(DecompositionStrategy.ECR_NATIVE, (0, 1), 2))
    psi = run_statevector(circ)
    rho = qst_reconstruct(_exact_qst_data(psi, 3), 3)
    assert state_fidelity(rho, np.outer(psi, psi.conj())) > 1 - 1e-9


def test_qst_random_pure_states_exact(rng):
    for _ in range(10):
        psi = random_state_vector(8, rng)
        rho = qst_reconstruct(_exact_qst_data(psi, 3), 3)
        assert state_fidelity(rho, np.outer(psi, psi.conj())) > 1 - 1e-9


def test_qst_sampled_output_is_physical(rng):
    psi = run_statevector(ghz_circuit())
    data = {s: sample_counts(psi, s, 500, seed=i).outcomes
            for i, s in enumerate(qst_settings(3))}
    rho = qst_reconstruct(data, 3)
    check_density_matrix(rho)


def test_qst_missing_setting_listed():
    psi = np.zeros(2, dtype=complex)
    psi[0] = 1.0
    data = _exact_qst_data(psi, 1)
    del data["Y"]
    with pytest.raises(MissingSettingError, match="Y"):
        qst_reconstruct(data, 1)


# -- process tomography -------------------------------------------------------------

def test_qpt_job_counts():
    toffoli = decompose_toffoli(DecompositionStrategy.ECR_NATIVE, (0, 1), 2)
    jobs = qpt_jobs(toffoli, 3, 11000, master_seed=5)
    assert len(jobs) == 1728
    assert sum(j.shots for j in jobs) == 19008000
    assert len({(j.probe, j.setting) for j in jobs}) == 1728
    # probe-major ordering with lexicographic settings inside
    assert jobs[0].probe == ("0", "0", "0") and jobs[0].setting == "XXX"
    assert jobs[26].probe == ("0", "0", "0") and jobs[26].setting == "ZZZ"
    assert jobs[27].probe == ("0", "0", "1")


def test_qpt_jobs_k1():
    circ = Circuit(1, (sx(0),))
    jobs = qpt_jobs(circ, 1, 100, master_seed=0)
    assert len(jobs) == 12
    assert len({j.seed for j in jobs}) == 12


def test_seed_derivation_stable():
    assert derive_seed(5, 3) == derive_seed(5, 3)
    assert derive_seed(5, 3) != derive_seed(5, 4)
    assert derive_seed(5, 3) != derive_seed(6, 3)


def test_choi_of_identity_single_qubit():
    sigma = choi_of_unitary(np.eye(2))
    expected = np.zeros((4, 4), dtype=complex)
    for m, n in itertools.product(range(2), repeat=2):
        expected[m * 2 + m, n * 2 + n] = 0.5
    assert np.max(np.abs(sigma - expected)) < 1e-12


def test_choi_unitary_normalization(rng):
    for dim in (2, 4, 8):
        u = random_unitary(dim, rng)
        sigma = choi_of_unitary(u)
        assert np.trace(sigma) == pytest.approx(1.0)
        assert np.real(np.trace(sigma @ sigma)) == pytest.approx(1.0, abs=1e-10)


def test_choi_rejects_non_unitary():
    with pytest.raises(NotUnitaryError):
        choi_of_unitary(np.diag([1.0, 0.5]))


def test_choi_apply_matches_unitary_action(rng):
    u = random_unitary(4, rng)
    sigma = choi_of_unitary(u)
    rho = np.outer(*(lambda v: (v, v.conj()))(random_state_vector(4, rng)))
    assert np.max(np.abs(choi_apply(sigma, rho) - u @ rho @ u.conj().T)) < 1e-10


def test_qpt_identity_channel_exact_k1():
    data = _exact_qpt_data(np.eye(2), 1)
    sigma = qpt_reconstruct(data, 1)
    assert np.max(np.abs(sigma - choi_of_unitary(np.eye(2)))) < 1e-8


def test_qpt_random_unitaries_exact(rng):
    for k in (1, 2):
        u = random_unitary(2 ** k, rng)
        sigma = qpt_reconstruct(_exact_qpt_data(u, k), k)
        assert process_fidelity(sigma, choi_of_unitary(u)) > 1 - 1e-8


def test_qpt_toffoli_exact():
    u = toffoli_unitary((0, 1), 2)
    sigma = qpt_reconstruct(_exact_qpt_data(u, 3), 3)
    assert process_fidelity(sigma, choi_of_unitary(u)) > 1 - 1e-8


def test_qpt_raw_estimate_is_trace_preserving(rng):
    # per-probe linear inversion fixes <I> = 1, so the unprojected Choi is TP
    u = random_unitary(2, rng)
    data = {}
    for i, probe in enumerate(itertools.product(PROBE_LABELS, repeat=1)):
        psi = u @ probe_state(probe)
        for j, setting in enumerate(qst_settings(1)):
            data[(probe, setting)] = sample_counts(psi, setting, 300,
                                                   seed=derive_seed(1, i, j)).outcomes
    recon = qpt_reconstruct_full(data, 1)
    assert recon.tp_deviation_raw < 1e-10
    check_density_matrix(recon.choi, eig_tol=1e-6, trace_tol=1e-8)


def test_qpt_sampled_output_is_physical():
    u = toffoli_unitary((0, 1), 2)
    data = {}
    for i, probe in enumerate(itertools.product(PROBE_LABELS, repeat=3)):
        psi = u @ probe_state(probe)
        for j, setting in enumerate(qst_settings(3)):
            data[(probe, setting)] = sample_counts(psi, setting, 50,
                                                   seed=derive_seed(0, i, j)).outcomes
    sigma = qpt_reconstruct(data, 3)
    check_density_matrix(sigma, eig_tol=1e-6, trace_tol=1e-8)
    assert tp_deviation(sigma) < 1e-6


def test_qpt_missing_cell():
    data = _exact_qpt_data(np.eye(2), 1)
    del data[(("+",), "Z")]
    with pytest.raises(MissingCellError):
        qpt_reconstruct(data, 1)


def test_qpt_product_channel_matches_tensor_product(rng):
    # Choi of U1 (x) U2 equals the index-reordered kron of single-qubit Chois
    u1 = random_unitary(2, rng)
    u2 = random_unitary(2, rng)
    joint = kron_le([u1, u2])
    sigma_joint = choi_of_unitary(joint)
    s1 = choi_of_unitary(u1)
    s2 = choi_of_unitary(u2)
    combined = np.kron(s2, s1)  # indices ((m2,p2),(m1,p1))
    perm = np.zeros(16, dtype=int)
    for m2, p2, m1, p1 in itertools.product(range(2), repeat=4):
        src = ((m2 * 2 + p2) * 4) + (m1 * 2 + p1)
        dst = ((m1 + 2 * m2) * 4) + (p1 + 2 * p2)
        perm[dst] = src
    reordered = combined[np.ix_(perm, perm)]
    assert np.max(np.abs(sigma_joint - reordered)) < 1e-8


def test_project_to_cptp_fixes_noise(rng):
    sigma = choi_of_unitary(random_unitary(2, rng))
    noise = rng.normal(scale=0.01, size=(4, 4)) + 1j * rng.normal(scale=0.01, size=(4, 4))
    noisy = sigma + (noise + noise.conj().T) / 2
    fixed = project_to_cptp(noisy)
    check_density_matrix(fixed, eig_tol=1e-6, trace_tol=1e-8)
    assert tp_deviation(fixed) < 1e-6


# -- fidelity metrics ----------------------------------------------------------------

def test_process_fidelity_self(rng):
    sigma = choi_of_unitary(random_unitary(8, rng))
    assert process_fidelity(sigma, sigma) == pytest.approx(1.0, abs=1e-9)


def test_process_fidelity_fully_depolarizing_vs_identity():
    sigma_mixed = np.eye(4, dtype=complex) / 4
    assert process_fidelity(sigma_mixed, choi_of_unitary(np.eye(2))) == pytest.approx(
        0.25, abs=1e-9)


def test_process_fidelity_pure_target_shortcut(rng):
    # against a unitary target the fidelity reduces to <omega| sigma |omega>
    u = random_unitary(4, rng)
    ops = random_cptp_kraus(4, rng)
    sigma = kraus_to_choi(ops)
    target = choi_of_unitary(u)
    w, v = np.linalg.eigh(target)
    ket = v[:, -1]
    shortcut = float(np.real(ket.conj() @ sigma @ ket))
    assert process_fidelity(sigma, target) == pytest.approx(shortcut, abs=1e-8)


def test_average_gate_fidelity_formula():
    assert average_gate_fidelity(1.0, 3) == 1.0
    assert average_gate_fidelity(0.0, 1) == pytest.approx(1 / 3)
    assert average_gate_fidelity(0.802, 3) == pytest.approx(0.8240, abs=1e-4)


def test_average_gate_fidelity_affine_monotone():
    k = 2
    values = [average_gate_fidelity(f, k) for f in (0.0, 0.25, 0.5, 0.75, 1.0)]
    diffs = np.diff(values)
    assert np.allclose(diffs, diffs[0])
    assert all(d > 0 for d in diffs)


def test_superop_identity_vs_x_orthogonal():
    # direct transfer-matrix computation: X flips the sign of Y and Z rows
    s_chan = choi_to_superop_pauli(choi_of_unitary(np.eye(2)))
    f = process_fidelity_superop(s_chan, np.array([[0, 1], [1, 0]], dtype=complex))
    assert f == pytest.approx(0.0, abs=1e-10)


def test_superop_self_fidelity(rng):
    u = random_unitary(4, rng)
    s_chan = unitary_to_superop_pauli(u)
    assert process_fidelity_superop(s_chan, u) == pytest.approx(1.0, abs=1e-10)


def test_superop_and_choi_paths_agree(rng):
    for _ in range(10):
        dim = 4
        u = random_unitary(dim, rng)
        ops = random_cptp_kraus(dim, rng)
        sigma = kraus_to_choi(ops)
        f_choi = process_fidelity(sigma, choi_of_unitary(u))
        f_superop = process_fidelity_superop(choi_to_superop_pauli(sigma), u)
        assert abs(f_choi - f_superop) < 1e-8


# -- dataset files --------------------------------------------------------------------

def test_dataset_round_trip(tmp_path, rng):
    u = random_unitary(2, rng)
    data = {}
    for i, probe in enumerate(itertools.product(PROBE_LABELS, repeat=1)):
        psi = u @ probe_state(probe)
        for j, setting in enumerate(qst_settings(1)):
            data[(probe, setting)] = sample_counts(psi, setting, 400,
                                                   seed=derive_seed(9, i, j)).outcomes
    circ = Circuit(1, (sx(0), rz(0.25, 0)))
    payload = dataset_to_dict("qpt", 1, 400, 9, circ, data, per_setting=False)
    path = tmp_path / "dataset.json"
    path.write_text(json.dumps(payload))
    kind, k, loaded, circ2 = dataset_from_dict(json.loads(path.read_text()))
    assert kind == "qpt" and k == 1 and circ2 == circ
    before = qpt_reconstruct(data, 1)
    after = qpt_reconstruct(loaded, 1)
    assert np.max(np.abs(before - after)) < 1e-12


def test_tomography_job_validation():
    with pytest.raises(ValueError):
        TomographyJob(("0",), "Z", 0, 1)
