import numpy as np
import pytest

from infogeom.errors import DimensionError, SchemaError, SingularOperatorError
from infogeom.linalg import (
    apply_superop, eig_hermitian, left_mult_superop, matrix_from_json, matrix_to_json,
    partial_trace, random_density, random_hermitian, random_tangent, right_mult_superop,
    sandwich_inverse, tensor, unvec, vec,
)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)


def test_eig_diagonal_input():
    w, U = eig_hermitian(np.diag([1.0, 2.0]))
    assert np.allclose(w, [1, 2])
    assert np.allclose(U, np.eye(2))


def test_eig_pauli_x():
    w, _ = eig_hermitian(PAULI_X)
    assert np.allclose(w, [-1, 1])


@pytest.mark.parametrize("d", [2, 3, 5, 8])
def test_eig_reconstruction(d):
    rng = np.random.default_rng(d)
    for _ in range(25):
        H = random_hermitian(d, seed=rng)
        w, U = eig_hermitian(H)
        assert np.all(np.diff(w) >= 0)
        assert np.linalg.norm(U @ np.diag(w) @ U.conj().T - H) < 1e-10 * np.linalg.norm(H)
        assert np.linalg.norm(U.conj().T @ U - np.eye(d)) < 1e-10


def test_eig_degenerate_basis_is_deterministic():
    V = np.linalg.qr(np.random.default_rng(1).standard_normal((4, 4)))[0]
    H = V @ np.diag([1.0, 1.0, 1.0, 3.0]) @ V.T
    a = eig_hermitian(H).eigenvectors
    b = eig_hermitian(H + 1e-15 * np.eye(4)).eigenvectors
    assert np.allclose(a, b, atol=1e-8)


def test_vec_roundtrip_and_column_order():
    A = np.arange(6.0).reshape(2, 3)[:, :2] + 1j
    assert np.array_equal(unvec(vec(A)), A)
    assert vec(np.array([[1, 2], [3, 4]]))[1] == 3


def test_mult_superops_match_products():
    rng = np.random.default_rng(0)
    rho, sigma = random_density(3, seed=rng), random_density(3, seed=rng)
    A = random_hermitian(3, seed=rng) + 1j * random_hermitian(3, seed=rng)
    assert np.linalg.norm(apply_superop(left_mult_superop(rho), A) - rho @ A) < 1e-12
    assert np.linalg.norm(apply_superop(right_mult_superop(rho), A) - A @ rho) < 1e-12
    Lr, Rs = left_mult_superop(rho), right_mult_superop(sigma)
    assert np.linalg.norm(Lr @ Rs - Rs @ Lr) < 1e-12


def test_mult_superops_identity():
    assert np.array_equal(left_mult_superop(np.eye(2)), np.eye(4))
    rho = random_density(2, seed=3)
    assert np.allclose(apply_superop(left_mult_superop(rho), np.eye(2)), rho)


def test_mult_superop_rejects_nonsquare():
    with pytest.raises(DimensionError):
        left_mult_superop(np.ones((2, 3)))


def test_sandwich_inverse_trivial_cases():
    X = random_hermitian(3, seed=1)
    I = np.eye(3) / 3
    assert np.allclose(sandwich_inverse(I, I, 1.0, X), 1.5 * X)
    sigma = random_density(3, seed=2)
    assert np.allclose(sandwich_inverse(sigma, I, 0.0, X), np.linalg.solve(sigma, X))


@pytest.mark.parametrize("s", [0.0, 0.3, 1.0])
def test_sandwich_inverse_residual(s):
    rng = np.random.default_rng(7)
    for d in range(2, 6):
        for _ in range(20):
            sigma, rho = random_density(d, seed=rng), random_density(d, seed=rng)
            X = random_hermitian(d, seed=rng) + 1j * random_hermitian(d, seed=rng)
            B = sandwich_inverse(sigma, rho, s, X)
            assert np.linalg.norm(sigma @ B + s * B @ rho - X) < 1e-10 * max(1, np.linalg.norm(X))


def test_sandwich_inverse_matches_integral():
    from scipy.integrate import quad_vec
    from scipy.linalg import expm

    rng = np.random.default_rng(11)
    sigma, rho = random_density(2, seed=rng), random_density(2, seed=rng)
    sigma, rho = sigma + 0.3 * np.eye(2), rho + 0.3 * np.eye(2)
    X = random_hermitian(2, seed=rng)
    T = 60.0 / min(np.linalg.eigvalsh(sigma)[0], np.linalg.eigvalsh(rho)[0])
    val, _ = quad_vec(lambda t: expm(-t * sigma) @ X @ expm(-t * rho), 0, T, epsabs=1e-12)
    assert np.linalg.norm(val - sandwich_inverse(sigma, rho, 1.0, X)) < 1e-8


def test_sandwich_inverse_singular():
    with pytest.raises(SingularOperatorError):
        sandwich_inverse(np.diag([1.0, 0.0]), np.diag([1.0, 0.0]), 0.0, np.eye(2))
    with pytest.raises(SchemaError):
        sandwich_inverse(np.eye(2), np.eye(2), -1.0, np.eye(2))


def test_tensor_and_partial_trace():
    assert np.array_equal(tensor(np.eye(2), np.eye(2)), np.eye(4))
    rho, tau = random_density(2, seed=1), random_density(3, seed=2)
    joint = tensor(rho, tau)
    assert np.allclose(partial_trace(joint, (2, 3), 1), rho)
    assert np.allclose(partial_trace(joint, (2, 3), 0), tau)
    A = random_hermitian(6, seed=4)
    assert abs(np.trace(partial_trace(A, (2, 3))) - np.trace(A)) < 1e-12
    loop = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for k in range(2):
            loop[i, k] = sum(A[3 * i + j, 3 * k + j] for j in range(3))
    assert np.allclose(partial_trace(A, (2, 3)), loop)


def test_random_generators():
    assert np.array_equal(random_density(3, seed=5), random_density(3, seed=5))
    rho = random_density(4, seed=6)
    assert np.linalg.eigvalsh(rho)[0] > 1e-12
    assert abs(np.trace(rho) - 1) < 1e-12
    pure = random_density(3, rank=1, seed=1)
    assert np.linalg.matrix_rank(pure, tol=1e-10) == 1
    t = random_tangent(3, seed=2)
    assert abs(np.trace(t)) < 1e-14
    assert abs(np.linalg.norm(t) - 1) < 1e-12


def test_matrix_json_roundtrip_and_symmetrization():
    A = random_hermitian(3, seed=9)
    B, corr = matrix_from_json(matrix_to_json(A), hermitian=True)
    assert np.allclose(A, B) and corr < 1e-14
    obj = {"dim": 2, "re": [[1, 0.1], [0, 1]], "im": [[0, 0], [0, 0]]}
    C, corr = matrix_from_json(obj, hermitian=True)
    assert np.allclose(C, C.conj().T) and corr > 0
    with pytest.raises(SchemaError):
        matrix_from_json({"dim": 3, "re": [[1, 0], [0, 1]]})
