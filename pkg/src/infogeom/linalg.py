"""Dense matrix plumbing: spectral decompositions, superoperators, sandwich solves.

Vectorization stacks columns, ``vec(A) = A.reshape(-1, order="F")``.  With that
convention ``vec(sigma @ X) = kron(I, sigma) @ vec(X)`` and
``vec(X @ rho) = kron(rho.T, I) @ vec(X)``.  Every superoperator in the package
is a ``d**2 x d**2`` array acting on column-stacked vectors.
"""

from __future__ import annotations

import json
from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, DimensionError, RankError, SchemaError, SingularOperatorError

#: eigenvalue threshold below which a state counts as rank deficient
EPS_RANK = 1e-12
#: most negative eigenvalue tolerated in a density matrix
PSD_TOL = -1e-10
#: absolute trace tolerance for states and tangent vectors
TRACE_TOL = 1e-12
#: relative hermiticity tolerance (in Frobenius norm)
HERM_TOL = 1e-12


class SpectralDecomposition(NamedTuple):
    """Ascending eigenvalues and the matching orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        U, w = self.eigenvectors, self.eigenvalues
        return (U * w) @ U.conj().T


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def as_square(A, name="matrix"):
    """Return ``A`` as a complex square array, rejecting NaN/Inf."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise SchemaError(f"{name} has non-finite entries")
    return A


def hermitize(A):
    """Symmetrize ``A`` to ``(A + A^dagger) / 2``."""
    A = np.asarray(A, dtype=complex)
    return 0.5 * (A + A.conj().T)


def check_hermitian(A, name="matrix", tol=HERM_TOL):
    """Validate near-hermiticity and return the symmetrized matrix."""
    A = as_square(A, name)
    if np.linalg.norm(A - A.conj().T) > tol * max(np.linalg.norm(A), 1e-300):
        raise SchemaError(f"{name} is not Hermitian")
    return hermitize(A)


def check_density(rho, name="state", full_rank=False):
    """Validate a density matrix: Hermitian, unit trace, PSD and optionally full rank."""
    rho = check_hermitian(rho, name)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > 1e-10:
        raise SchemaError(f"{name} has trace {tr}, expected 1")
    w = np.linalg.eigvalsh(rho)
    if w[0] < PSD_TOL:
        raise SchemaError(f"{name} has negative eigenvalue {w[0]:.3e}")
    if full_rank and w[0] <= EPS_RANK:
        raise RankError(f"{name} is not full rank (min eigenvalue {w[0]:.3e})")
    return rho


def is_full_rank(rho):
    return np.linalg.eigvalsh(hermitize(rho))[0] > EPS_RANK


def check_tangent(drho, name="perturbation"):
    """Validate a traceless Hermitian perturbation."""
    drho = check_hermitian(drho, name)
    if abs(np.trace(drho)) > 1e-10 * max(1.0, np.linalg.norm(drho)):
        raise SchemaError(f"{name} must be traceless")
    return drho


# ---------------------------------------------------------------------------
# spectral calculus
# ---------------------------------------------------------------------------

def _canonical_phase(U):
    # make the largest component of each column real and positive
    idx = np.argmax(np.abs(U) > np.abs(U).max(axis=0) * (1 - 1e-8), axis=0)
    ph = U[idx, np.arange(U.shape[1])]
    ph = ph / np.abs(ph)
    return U / ph


def eig_hermitian(H, degeneracy_tol=1e-10):
    """Spectral decomposition of a Hermitian matrix.

    Eigenvalues are ascending.  Inside each (numerically) degenerate eigenspace
    the basis is fixed by projecting the standard basis vectors in input order
    and orthonormalizing, so the output does not depend on LAPACK internals.

    Parameters
    ----------
    H : array_like
        Hermitian matrix (symmetrized before diagonalization).
    degeneracy_tol : float
        Relative gap below which eigenvalues are grouped.

    Returns
    -------
    SpectralDecomposition
    """
    H = hermitize(as_square(H))
    try:
        w, U = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver did not converge: {exc}") from exc
    d = len(w)
    scale = max(np.abs(w).max(), 1.0) if d else 1.0
    U = U.copy()
    start = 0
    while start < d:
        stop = start + 1
        while stop < d and w[stop] - w[stop - 1] <= degeneracy_tol * scale:
            stop += 1
        if stop - start > 1:
            block = U[:, start:stop]
            proj = block @ block.conj().T
            basis = []
            for k in range(d):
                v = proj[:, k].copy()
                for b in basis:
                    v -= b * (b.conj() @ v)
                nv = np.linalg.norm(v)
                if nv > 1e-6:
                    basis.append(v / nv)
                if len(basis) == stop - start:
                    break
            U[:, start:stop] = np.column_stack(basis)
            w[start:stop] = w[start:stop].mean()
        start = stop
    return SpectralDecomposition(w, _canonical_phase(U))


def matrix_function(H, func):
    """Apply a scalar function to a Hermitian matrix through its spectrum."""
    w, U = np.linalg.eigh(hermitize(H))
    return (U * func(w)) @ U.conj().T


def sqrtm_psd(A):
    """Principal square root of a PSD matrix (negative noise clipped to zero)."""
    return matrix_function(A, lambda w: np.sqrt(np.clip(w, 0.0, None)))


def powm(A, p):
    """Real power of a positive definite matrix; ``p <= 0`` requires full rank."""
    w, U = np.linalg.eigh(hermitize(A))
    if p <= 0 and w[0] <= EPS_RANK:
        raise RankError("negative or zero power of a singular matrix")
    w = np.clip(w, 0.0, None)
    return (U * w ** p) @ U.conj().T


def logm_pd(A):
    """Matrix logarithm of a positive definite matrix."""
    w, U = np.linalg.eigh(hermitize(A))
    if w[0] <= EPS_RANK:
        raise RankError("logarithm of a singular matrix")
    return (U * np.log(w)) @ U.conj().T


# ---------------------------------------------------------------------------
# superoperators
# ---------------------------------------------------------------------------

def vec(A):
    """Column-stacking vectorization."""
    return np.asarray(A).reshape(-1, order="F")


def unvec(v, d=None):
    """Inverse of :func:`vec`."""
    v = np.asarray(v)
    if d is None:
        d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise DimensionError(f"cannot reshape vector of size {v.size} to a square matrix")
    return v.reshape((d, d), order="F")


def left_mult_superop(rho):
    """Superoperator of ``A -> rho @ A``."""
    rho = as_square(rho)
    return np.kron(np.eye(rho.shape[0]), rho)


def right_mult_superop(rho):
    """Superoperator of ``A -> A @ rho``."""
    rho = as_square(rho)
    return np.kron(rho.T, np.eye(rho.shape[0]))


def sandwich_superop(A, B=None):
    """Superoperator of ``X -> A @ X @ B`` (``B`` defaults to ``A^dagger``)."""
    A = np.asarray(A, dtype=complex)
    if B is None:
        B = A.conj().T
    return np.kron(np.asarray(B).T, A)


def apply_superop(S, X):
    """Apply a superoperator matrix to an operator."""
    X = np.asarray(X, dtype=complex)
    if S.shape[1] != X.size:
        raise DimensionError(f"superoperator of shape {S.shape} cannot act on {X.shape}")
    return unvec(S @ vec(X), X.shape[0])


def superop_from_function(func, d):
    """Build the matrix of a linear map on ``d x d`` operators by acting on a basis."""
    S = np.zeros((d * d, d * d), dtype=complex)
    for k in range(d * d):
        E = np.zeros(d * d, dtype=complex)
        E[k] = 1.0
        S[:, k] = vec(func(unvec(E, d)))
    return S


def hs_adjoint(S):
    """Hilbert-Schmidt adjoint of a superoperator (conjugate transpose of its matrix)."""
    return np.asarray(S).conj().T


def hs_inner(A, B):
    """Hilbert-Schmidt inner product ``Tr[A^dagger B]``."""
    return np.vdot(np.asarray(A).reshape(-1), np.asarray(B).reshape(-1))


def sandwich_inverse(sigma, rho, s, X, tol=1e-14):
    """Solve ``sigma @ B + s * B @ rho = X`` for ``B``.

    Works in the eigenbases of ``sigma`` (left) and ``rho`` (right), where the
    solution is ``B'_ij = X'_ij / (sigma_i + s * rho_j)``.

    Parameters
    ----------
    sigma, rho : array_like
        Positive semidefinite matrices of equal dimension.
    s : float
        Non-negative weight of the right multiplication.
    X : array_like
        Right-hand side.

    Raises
    ------
    SingularOperatorError
        When a denominator falls below ``tol``.
    """
    if s < 0:
        raise SchemaError("s must be non-negative")
    sigma, rho, X = as_square(sigma), as_square(rho), as_square(X)
    if not (sigma.shape == rho.shape == X.shape):
        raise DimensionError("sandwich_inverse operands differ in dimension")
    ws, Us = np.linalg.eigh(hermitize(sigma))
    wr, Ur = np.linalg.eigh(hermitize(rho))
    den = ws[:, None] + s * wr[None, :]
    if np.min(np.abs(den)) < tol:
        raise SingularOperatorError("L_sigma + s R_rho is singular")
    Xp = Us.conj().T @ X @ Ur
    return Us @ (Xp / den) @ Ur.conj().T


# ---------------------------------------------------------------------------
# tensor structure
# ---------------------------------------------------------------------------

def tensor(*ops):
    """Kronecker product of any number of operators."""
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def partial_trace(A, dims, trace_out=1):
    """Partial trace over one factor of a bipartite operator.

    Parameters
    ----------
    A : array_like
        Operator on ``C^{dA} (x) C^{dB}``.
    dims : tuple of int
        ``(dA, dB)``.
    trace_out : {0, 1}
        Which factor to trace out.
    """
    dA, dB = dims
    A = np.asarray(A, dtype=complex)
    if A.shape != (dA * dB, dA * dB):
        raise DimensionError(f"operator shape {A.shape} does not factor as {dims}")
    T = A.reshape(dA, dB, dA, dB)
    if trace_out == 1:
        return np.einsum("ijkj->ik", T)
    if trace_out == 0:
        return np.einsum("ijil->jl", T)
    raise SchemaError("trace_out must be 0 or 1")


# ---------------------------------------------------------------------------
# random instances
# ---------------------------------------------------------------------------

def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def ginibre(d, k=None, seed=None):
    rng = _rng(seed)
    k = d if k is None else k
    return rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))


def random_density(d, rank=None, seed=None):
    """Ginibre-distributed density matrix.

    A full-rank request (the default) mixes in ``1e-6`` of the maximally mixed
    state so that the smallest eigenvalue stays above :data:`EPS_RANK`.
    """
    rank = d if rank is None else rank
    if not 1 <= rank <= d:
        raise SchemaError("rank must lie in [1, d]")
    G = ginibre(d, rank, seed)
    rho = G @ G.conj().T
    rho = hermitize(rho / np.trace(rho).real)
    if rank == d:
        rho = (1 - 1e-6) * rho + 1e-6 * np.eye(d) / d
    return rho


def random_hermitian(d, seed=None):
    G = ginibre(d, d, seed)
    return hermitize(G)


def random_tangent(d, seed=None):
    """Traceless Hermitian matrix with unit Frobenius norm."""
    A = random_hermitian(d, seed)
    A = A - np.trace(A) / d * np.eye(d)
    return A / np.linalg.norm(A)


def random_unitary(d, seed=None):
    """Haar-random unitary via QR of a Ginibre matrix."""
    Q, R = np.linalg.qr(ginibre(d, d, seed))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


# ---------------------------------------------------------------------------
# JSON I/O
# ---------------------------------------------------------------------------

def matrix_to_json(A):
    """Encode a matrix as ``{"dim", "re", "im"}`` with row-major nested lists."""
    A = np.asarray(A, dtype=complex)
    return {"dim": int(A.shape[0]), "re": A.real.tolist(), "im": A.imag.tolist()}


def matrix_from_json(obj, hermitian=False):
    """Decode the matrix JSON layout.

    Returns
    -------
    (ndarray, float)
        The matrix and the Frobenius size of the hermiticity correction applied
        (zero when ``hermitian`` is false).
    """
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        dim = int(obj.get("dim", re.shape[0]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed matrix JSON: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise SchemaError(f"matrix JSON declares dim {dim} but has shape {re.shape}")
    A = as_square(re + 1j * im)
    correction = 0.0
    if hermitian:
        H = hermitize(A)
        correction = float(np.linalg.norm(H - A))
        A = H
    return A, correction
