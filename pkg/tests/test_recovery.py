import numpy as np
import pytest
from scipy.linalg import fractional_matrix_power as mpow

from infogeom.dynamics import amplitude_damping, amplitude_damping_generator, random_channel, unitary_channel
from infogeom.errors import RankError, SchemaError
from infogeom.linalg import random_density, random_tangent, random_unitary
from infogeom.recovery import (
    chi2_recovery_gap, composition_check, duality_residual, involution_check, petz_map,
    petz_supremum_check, recovery_spectrum, retrodiction_csv, retrodiction_trajectory, rotated_petz,
)


@pytest.fixture
def setup():
    rng = np.random.default_rng(31)
    return random_density(3, seed=rng), random_channel(3, seed=rng)


def test_sqrt_pair_is_standard_petz(setup):
    pi, Phi = setup
    X = random_tangent(3, seed=2)
    out = Phi.apply(pi)
    q = mpow(out, -0.5)
    ref = mpow(pi, 0.5) @ Phi.adjoint().apply(q @ X @ q) @ mpow(pi, 0.5)
    R = petz_map("sqrt", "sqrt", pi, Phi)
    assert np.allclose(R(X), ref)
    assert R.cp_flag == "guaranteed"
    assert R.channel.is_cptp()


@pytest.mark.parametrize("pair", [("bures", "bures"), ("harmonic", "kmb"), ("sqrt", "wy")])
def test_prior_recovered(pair, setup):
    pi, Phi = setup
    R = petz_map(*pair, pi, Phi)
    assert np.linalg.norm(R(Phi.apply(pi)) - pi) < 1e-10
    assert R.channel.trace_preservation_error() < 1e-10


def test_duality(setup):
    pi, Phi = setup
    A, B = random_tangent(3, seed=3), random_tangent(3, seed=4)
    assert duality_residual("kmb", "bures", pi, Phi, A, B) < 1e-12


def test_unitary_channel_is_inverted():
    pi = random_density(3, seed=5)
    Phi = unitary_channel(random_unitary(3, seed=6))
    R = petz_map("bures", "bures", pi, Phi)
    assert np.allclose(R.round_trip(Phi), np.eye(9))


def test_spectrum_in_unit_interval(setup):
    pi, Phi = setup
    out = recovery_spectrum("harmonic", "bures", pi, Phi)
    assert out["eigenvalues"][0] > -1e-12 and out["eigenvalues"][-1] < 1 + 1e-12
    assert abs(out["eigenvalues"][-1] - 1) < 1e-10
    assert out["hermiticity"] < 1e-12
    with pytest.raises(SchemaError):
        recovery_spectrum("bures", "harmonic", pi, Phi)


def test_involution_and_composition(setup):
    pi, Phi = setup
    assert involution_check("kmb", "wy", pi, Phi) < 1e-10
    Psi = random_channel(3, seed=9)
    assert composition_check("bures", "kmb", "harmonic", pi, Phi, Psi) < 1e-10


def test_rotated_petz(setup):
    pi, Phi = setup
    R0 = rotated_petz(Phi, pi, 0.0)
    assert np.allclose(R0.superop, petz_map("sqrt", "sqrt", pi, Phi).superop)
    Rt = rotated_petz(Phi, pi, 0.7)
    assert Rt.channel.is_cptp(1e-9)
    assert np.linalg.norm(Rt(Phi.apply(pi)) - pi) < 1e-10


def test_rank_deficient_output_rejected():
    with pytest.raises(RankError):
        petz_map("bures", "bures", np.eye(2) / 2, amplitude_damping(1.0))


def test_chi2_chain(setup):
    pi, Phi = setup
    rho = random_density(3, seed=10)
    out = chi2_recovery_gap("harmonic", "bures", rho, pi, Phi)
    assert out["holds"]
    assert out["lhs"] >= out["mid"] - 1e-12 >= out["rhs"] - 2e-12


def test_supremum(setup):
    pi, Phi = setup
    res = petz_supremum_check(pi, Phi)
    assert res["gaps"] and res["min_gap"] >= -1e-10


def test_retrodiction_rows():
    L = amplitude_damping_generator(1.0)
    pi = random_density(2, seed=1)
    dr = 0.05 * random_tangent(2, seed=2)
    rows = retrodiction_trajectory("sqrt", "sqrt", pi, dr, L, [0.0, 0.5])
    assert rows[0]["retrieval_divergence"] < 1e-12
    mixed = retrodiction_trajectory("sqrt", "bures", pi, dr, L, [0.0])
    assert mixed[0]["retrieval_divergence"] > 0    # J_f' J_f^{-1} is not the identity
    assert rows[1]["retrieval_divergence"] > 0
    assert not rows[1]["expansion_flag"]
    assert retrodiction_csv(rows, ["seed: 1"]).startswith("# seed: 1\nt,")
