import json

import numpy as np
import pytest

from infogeom.detailed_balance import (
    alicki_adjoint, fisher_only_counterexample, build_db_lindbladian, build_fisher_db_extra,
    classical_embedding, db_report, fisher_adjoint, is_alicki_db, is_fisher_db,
    modular_commutator_norm, resynthesize, split_generator, steady_state_residual,
    structural_decompose, transpose_superop,
)
from infogeom.dynamics import classical_db_check, rate_matrix
from infogeom.errors import DegeneracyError, RankError, SchemaError
from infogeom.linalg import eig_hermitian, random_tangent, random_unitary, unvec, vec

QUTRIT = np.diag(np.exp(-np.arange(3.0)) / np.exp(-np.arange(3.0)).sum())[::-1, ::-1]
UNEVEN = np.diag([0.1, 0.3, 0.6])       # distinct Bohr frequencies


def rotated(pi, seed):
    U = random_unitary(pi.shape[0], seed=seed)
    return U @ pi @ U.conj().T


def qubit_sector_generator():
    pi = np.diag([0.3, 0.7])
    L = build_db_lindbladian(pi, [{"terms": [(1, 0, 1.0)], "rate": 0.8}])
    return L, pi


def test_two_level_sector_passes_both():
    L, pi = qubit_sector_generator()
    assert is_alicki_db(L, pi)[0]
    assert is_fisher_db(L, pi)[0]
    assert steady_state_residual(L, pi) < 1e-14
    # partner rate carries the modular factor
    assert np.allclose(sorted(L.rates), sorted([0.8, 0.8 * 0.3 / 0.7]))


def test_zero_rates_give_zero_generator():
    pi = np.diag([0.3, 0.7])
    L = build_db_lindbladian(pi, [{"terms": [(1, 0, 1.0)], "rate": 0.0}])
    assert np.allclose(L.superop(), 0)
    rep = db_report(L, pi)
    assert rep.alicki_ok and rep.fisher_ok
    assert not rep.structural["jump_sectors"] and not rep.structural["transpose_sectors"]


def test_three_level_two_sectors():
    pi = rotated(UNEVEN, 1)
    H = pi @ pi
    sectors = [{"terms": [(2, 1, 1.0)], "rate": 0.5},
               {"terms": [(1, 0, 0.6), ], "rate": 1.2}]
    L = build_db_lindbladian(pi, sectors, H=H)
    assert steady_state_residual(L, pi) < 1e-13
    rep = db_report(L, pi)
    assert rep.verdict_line() == "fisher: PASS, alicki: PASS"
    dec = rep.structural
    assert np.linalg.norm(resynthesize(dec, pi) - L.superop()) < 1e-10
    assert len(dec["jump_sectors"]) == 4


def test_equal_spacing_allows_mixed_terms():
    L = build_db_lindbladian(QUTRIT, [{"terms": [(2, 1, 1.0), (1, 0, 0.5)], "rate": 1.0}])
    assert steady_state_residual(L, QUTRIT) < 1e-13
    assert is_alicki_db(L, QUTRIT)[0]


def test_modular_eigenoperator_required():
    pi = UNEVEN
    with pytest.raises(SchemaError):
        build_db_lindbladian(pi, [{"terms": [(2, 1, 1.0), (1, 0, 1.0)], "rate": 1.0}])
    with pytest.raises(SchemaError):
        build_db_lindbladian(pi, [{"terms": [(2, 1, 1.0)], "rate": -1.0}])
    with pytest.raises(SchemaError):
        build_db_lindbladian(pi, [], H=random_tangent(3, seed=0))


def test_degenerate_state_raises():
    with pytest.raises(DegeneracyError):
        build_db_lindbladian(np.diag([0.25, 0.25, 0.5]), [{"terms": [(2, 1, 1.0)], "rate": 1.0}])


def test_rank_deficient_state_raises():
    L, _ = qubit_sector_generator()
    with pytest.raises(RankError):
        is_alicki_db(L, np.diag([1.0, 0.0]))


def test_zero_weights_reduce_to_lindblad_form():
    pi = QUTRIT
    sectors = [{"terms": [(2, 1, 1.0)], "rate": 0.5}]
    group = [{"terms": [(0, 0, 1.0)], "weight": 0.0}, {"terms": [(1, 1, 1.0)], "weight": 0.0}]
    G = build_fisher_db_extra(pi, sectors, [group])
    assert np.allclose(G, build_db_lindbladian(pi, sectors).superop())


def zero_sum_generator():
    pi = QUTRIT
    I = [(k, k, 1.0) for k in range(3)]
    Z = [(0, 0, 1.0), (1, 1, -1.0), (2, 2, 1.0)]
    group = [{"terms": I, "weight": 0.2}, {"terms": Z, "weight": -0.2}]
    sectors = [{"terms": [(2, 1, 1.0)], "rate": 0.5}]
    return build_fisher_db_extra(pi, sectors, [group]), pi


def test_zero_sum_transpose_term():
    G, pi = zero_sum_generator()
    rep = db_report(G, pi)
    assert rep.fisher_ok and not rep.alicki_ok
    assert all(rep.fisher_ok_per_f.values())
    assert steady_state_residual(G, pi) < 1e-13
    mus = [mu for ent in rep.structural["transpose_sectors"].values() for mu, _ in ent]
    assert abs(sum(mus)) < 1e-12 and max(mus) > 0.1


def test_transpose_group_must_cancel():
    group = [{"terms": [(0, 0, 1.0)], "weight": 0.2}, {"terms": [(1, 1, 1.0)], "weight": -0.2}]
    with pytest.raises(SchemaError):
        build_fisher_db_extra(QUTRIT, [], [group])


def test_transpose_superop_in_eigenbasis():
    pi = rotated(QUTRIT, 3)
    X = random_tangent(3, seed=4)
    U = eig_hermitian(pi).eigenvectors
    T = unvec(transpose_superop(pi) @ vec(X))
    assert np.allclose(U.conj().T @ T @ U, (U.conj().T @ X @ U).T)


def test_fisher_only_counterexample():
    L, pi = fisher_only_counterexample()
    rep = db_report(L, pi)
    assert rep.verdict_line() == "fisher: PASS, alicki: FAIL"
    assert rep.alicki_residual > 0.1
    assert modular_commutator_norm(L, pi) > 1.0
    mus = sorted(mu for ent in rep.structural["transpose_sectors"].values() for mu, _ in ent)
    assert np.allclose(mus, [-np.exp(-0.5), np.exp(-0.5)])
    assert json.loads(rep.to_json())["verdicts"] == {"alicki": False, "fisher": True}


def test_maximally_mixed_verdicts_coincide():
    L, _ = fisher_only_counterexample()
    pi = np.eye(2) / 2
    assert is_alicki_db(L, pi)[0] == is_fisher_db(L, pi)[0]


def test_adjoint_roundtrips():
    pi = rotated(QUTRIT, 5)
    rng = np.random.default_rng(6)
    O = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
    assert np.linalg.norm(alicki_adjoint(alicki_adjoint(O, pi), pi) - O) < 1e-10
    for f in ("bures", "kmb", "wy"):
        assert np.linalg.norm(fisher_adjoint(fisher_adjoint(O, pi, f), pi, f) - O) < 1e-10


def test_split_generator_reassembles():
    L, pi = qubit_sector_generator()
    H, U, D, res = split_generator(L, pi)
    assert res < 1e-12
    assert np.allclose(U + D, L.superop())


def test_classical_embedding_agrees_with_rate_check():
    rng = np.random.default_rng(7)
    for k in range(40):
        pi = rng.dirichlet(np.ones(3))
        a = rng.random((3, 3))
        if k % 2 == 0:
            a = np.sqrt(a * a.T) * np.sqrt(pi[:, None] / pi[None, :])
        R = rate_matrix(a)
        L = classical_embedding(R)
        expect = classical_db_check(R, pi, tol=1e-9)["holds"]
        assert is_alicki_db(L, np.diag(pi))[0] == expect
        assert is_fisher_db(L, np.diag(pi))[0] == expect


def test_structural_decompose_rejects_non_db():
    L, pi = qubit_sector_generator()
    with pytest.raises(SchemaError):
        structural_decompose(L, np.diag([0.6, 0.4]))
