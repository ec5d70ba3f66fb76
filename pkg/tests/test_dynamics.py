import numpy as np
import pytest
from scipy.linalg import expm

from infogeom.dynamics import (
    DepolarizingFamily, Lindbladian, QuantumChannel, amplitude_damping, amplitude_damping_generator,
    negative_rate_counterexample, canonical_form, check_rate_matrix, classical_channel, classical_db_check,
    converse_probe, count_roots, depolarizing, dissipator_superop, evolve, fisher_at,
    fisher_trajectory, gell_mann_basis, hamiltonian_superop, identity_channel, is_classical_markov,
    jump_current, markov_report, preset, random_channel, random_stochastic, rate_matrix,
    richardson_derivative, sign_changes, trace_distance_derivative,
    trace_distance_derivative_sign_sum, transpose_map, unitary_channel,
)
from infogeom.errors import DimensionError, SchemaError, UnsupportedMeasureError
from infogeom.fisher import fisher_information
from infogeom.linalg import random_density, random_tangent, random_unitary, unvec, vec


def test_channel_constructors_are_cptp():
    for ch in (identity_channel(3), unitary_channel(random_unitary(3, seed=1)),
               depolarizing(0.4, 3), amplitude_damping(0.3), random_channel(3, seed=2),
               classical_channel(random_stochastic(3, seed=3))):
        assert ch.is_cptp()


def test_transpose_is_positive_not_cp():
    T = transpose_map(2)
    assert T.trace_preservation_error() < 1e-12
    assert T.min_choi_eigenvalue() < -0.1
    assert T.is_positive_probe(trials=200, seed=0) >= -1e-12


def test_kraus_superop_roundtrip():
    ch = random_channel(2, seed=4)
    again = QuantumChannel(kraus=ch.to_kraus())
    assert np.allclose(again.superop, ch.superop)
    with pytest.raises(SchemaError):
        QuantumChannel()


def test_amplitude_damping_action():
    rho = np.diag([0.2, 0.8])
    assert np.allclose(amplitude_damping(0.25).apply(rho), np.diag([0.4, 0.6]))


def test_adjoint_duality():
    ch = random_channel(3, seed=5)
    rho, X = random_density(3, seed=6), random_tangent(3, seed=7)
    lhs = np.trace(X @ ch.apply(rho))
    rhs = np.trace(ch.adjoint().apply(X) @ rho)
    assert abs(lhs - rhs) < 1e-12


def test_tensor_with_identity_on_product():
    ch = random_channel(2, seed=8)
    a, b = random_density(2, seed=9), random_density(2, seed=10)
    out = ch.tensor_with_identity(2).apply(np.kron(a, b))
    assert np.allclose(out, np.kron(ch.apply(a), b))


def test_gell_mann_orthonormal():
    B = gell_mann_basis(3)
    G = np.array([[np.trace(x.conj().T @ y) for y in B] for x in B])
    assert np.allclose(G, np.eye(8))
    assert all(abs(np.trace(x)) < 1e-15 for x in B)


def test_canonical_form_recovers_generator():
    rng = np.random.default_rng(0)
    H = random_tangent(3, seed=rng)
    jumps = [np.triu(rng.standard_normal((3, 3)), 1), np.diag([1.0, -1.0, 0.0])]
    G = hamiltonian_superop(H) + sum(dissipator_superop(A, r) for A, r in zip(jumps, [0.7, 0.3]))
    L = canonical_form(G)
    assert np.allclose(L.superop(), G)
    assert np.all(L.rates >= -1e-12)
    assert np.allclose(L.H - np.trace(L.H) / 3 * np.eye(3), H - np.trace(H) / 3 * np.eye(3))


def test_canonical_form_rejects_non_generator():
    with pytest.raises(SchemaError):
        canonical_form(np.eye(4))


def test_propagator_matches_expm():
    L = amplitude_damping_generator(0.8)
    assert np.allclose(L.propagator(1.3), expm(1.3 * L.superop()))
    rho = np.diag([0.1, 0.9])
    assert np.allclose(unvec(L.propagator(1.3) @ vec(rho)),
                       amplitude_damping(1 - np.exp(-0.8 * 1.3)).apply(rho))


def test_evolve_rk4_against_exact():
    L = amplitude_damping_generator(1.0)
    rho0 = random_density(2, seed=1)
    traj = evolve(L, rho0, 2.0, 0.01)
    assert np.allclose(traj.states[-1], unvec(L.propagator(2.0) @ vec(rho0)), atol=1e-9)
    with pytest.raises(DimensionError):
        evolve(L, np.eye(3) / 3, 1.0, 0.1)
    with pytest.raises(SchemaError):
        evolve(L, rho0, 1.0, 0.0)


def test_depolarizing_family_generator_consistent():
    fam = DepolarizingFamily("markov")
    t, h = 0.7, 1e-5
    dP = (fam.propagator(t + h) - fam.propagator(t - h)) / (2 * h)
    assert np.allclose(dP, fam.superop(t) @ fam.propagator(t), atol=1e-8)


def test_presets():
    assert preset("depolarizing:markov").kind == "markov"
    assert preset(" Depolarizing-NonMarkov ").kind == "nonmarkov"
    assert preset("amplitude-damping").d == 2
    with pytest.raises(SchemaError):
        preset("dephasing")


def test_lindbladian_json_roundtrip():
    L = amplitude_damping_generator(0.5)
    again = Lindbladian.from_json(L.to_json())
    assert np.allclose(again.superop(), L.superop())


def test_jump_current_nonpositive():
    rng = np.random.default_rng(3)
    A = np.array([[0, 1], [0, 0]], dtype=complex)
    for name in ("bures", "kmb", "wy", "harmonic"):
        pi, dr = random_density(2, seed=rng), random_tangent(2, seed=rng)
        assert jump_current(name, A, pi, dr) <= 1e-14
    with pytest.raises(UnsupportedMeasureError):
        jump_current("variance", A, pi, dr)


@pytest.mark.parametrize("name", ["bures", "kmb", "wy"])
def test_flux_matches_derivative(name):
    L = amplitude_damping_generator(1.0)
    rep = fisher_trajectory(name, random_density(2, seed=2), random_tangent(2, seed=3), L,
                            [0.0, 0.3, 1.2])
    assert rep.max_relative_error() < 1e-6
    assert "F'_analytic" in rep.to_csv().splitlines()[0]


def test_fisher_trajectory_without_measure():
    L = amplitude_damping_generator(1.0)
    rep = fisher_trajectory("variance", random_density(2, seed=2), random_tangent(2, seed=3), L, [0.5])
    assert rep.derivative_analytic is None and rep.notes
    with pytest.raises(UnsupportedMeasureError):
        rep.max_relative_error()


def test_richardson_forward_at_boundary():
    d = richardson_derivative(np.exp, 0.0, h=1e-2, lower=0.0)
    assert abs(d - 1) < 1e-7
    assert abs(richardson_derivative(np.sin, 1.0) - np.cos(1.0)) < 1e-12


def test_sign_changes_and_roots():
    assert sign_changes([1, -1, 0, -2, 3]) == 2
    roots = count_roots(np.sin, 0.5, 10.0)
    assert np.allclose(roots, [np.pi, 2 * np.pi, 3 * np.pi])


def test_markov_reports():
    assert markov_report(amplitude_damping_generator(), 2.0, n_grid=11)["verdict"] == "MARKOVIAN"
    fam = DepolarizingFamily("nonmarkov")
    rep = markov_report(fam, 1.5, n_grid=31, trials=20,
                        exclude=lambda t: abs(np.cos(2 * t)) < 1e-3)
    assert rep["verdict"] == "NON-MARKOVIAN"
    assert rep["min_rate"] < 0


def test_converse_probe_transpose_and_cp():
    assert converse_probe(transpose_map(2), trials=2000, seed=0)["found"]
    assert not converse_probe(depolarizing(0.3), trials=200, seed=0)["found"]


def test_fisher_contracts_under_channel():
    ch = random_channel(3, seed=12)
    pi, dr = random_density(3, seed=13), random_tangent(3, seed=14)
    for name in ("bures", "kmb", "harmonic"):
        assert (fisher_information(name, ch.apply(pi), ch.apply(dr))
                <= fisher_information(name, pi, dr) * (1 + 1e-12))


def test_rate_matrix_checks():
    R = rate_matrix([[0, 1.0], [2.0, 0]])
    assert np.allclose(R.sum(axis=0), 0)
    with pytest.raises(SchemaError):
        check_rate_matrix(np.ones((2, 2)))
    assert is_classical_markov([R])
    assert not is_classical_markov([rate_matrix([[0, -1.0], [2.0, 0]])])


def test_classical_detailed_balance():
    pi = np.array([0.5, 0.3, 0.2])
    a = np.zeros((3, 3))
    a[0, 1], a[1, 0] = 0.6, 0.6 * 0.3 / 0.5
    a[2, 1], a[1, 2] = 0.4, 0.4 * 0.3 / 0.2
    assert classical_db_check(rate_matrix(a), pi)["holds"]
    a[0, 2] = 0.1
    assert not classical_db_check(rate_matrix(a), pi)["holds"]


def test_trace_distance_derivative_forms_agree():
    rng = np.random.default_rng(5)
    for _ in range(20):
        R = rate_matrix(rng.random((4, 4)))
        x = rng.standard_normal(4)
        x -= x.mean()
        assert abs(trace_distance_derivative(R, x) - trace_distance_derivative_sign_sum(R, x)) < 1e-12


def test_negative_rate_counterexample():
    out = negative_rate_counterexample()
    assert out["negative_rate"]
    assert out["max_traceless_derivative"] <= 0
    assert out["traceful_derivative"] > 0
    assert out["embedded_derivative"] > 0


def test_fisher_at_time_zero():
    L = amplitude_damping_generator()
    pi, dr = random_density(2, seed=1), random_tangent(2, seed=2)
    assert abs(fisher_at("bures", L, pi, dr, 0.0) - fisher_information("bures", pi, dr)) < 1e-12


def test_schedule_table_interpolates():
    obj = amplitude_damping_generator(1.0).to_json()
    obj["schedule"] = {"t": [0.0, 1.0], "rates": [[1.0], [3.0]]}
    L = Lindbladian.from_json(obj)
    assert np.allclose(L.at(0.5)[1], [2.0])
    assert np.allclose(L.at(5.0)[1], [3.0])
    obj["schedule"]["t"] = [1.0, 0.0]
    with pytest.raises(SchemaError):
        Lindbladian.from_json(obj)
