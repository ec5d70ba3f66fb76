"""Quantum Fisher operators ``J_f|pi`` and the quantities built on them.

In the eigenbasis of ``pi`` the operator acts entrywise,
``J_f|pi[|i><j|] = f(pi_i/pi_j) pi_j |i><j|``, so applying it (or its inverse)
is a rotation, a Hadamard product with the kernel and a rotation back.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.special import logsumexp

from .errors import RankError, UnidentifiableError
from .linalg import EPS_RANK, eig_hermitian, hermitize
from .monotones import get_monotone, kmb


class CPReport(NamedTuple):
    cp: bool
    min_eigenvalue: float


class FisherOperator:
    """``J_f`` at a full-rank state ``pi``.

    Parameters
    ----------
    f : StandardMonotone or str
        Monotone or registry name.
    pi : array_like
        Full-rank density matrix (base point).
    """

    def __init__(self, f, pi):
        self.f = get_monotone(f)
        self.pi = hermitize(pi)
        self.spectral = eig_hermitian(self.pi)
        w = self.spectral.eigenvalues
        if w[0] <= EPS_RANK:
            raise RankError(f"Fisher operator needs a full-rank state (min eigenvalue {w[0]:.3e})")
        self.kernel = np.asarray(self.f.mean(w[:, None], w[None, :]), dtype=float)
        scale = self.kernel.max()
        if np.max(np.abs(self.kernel - self.kernel.T)) > 1e-10 * scale:
            raise ValueError(f"kernel of {self.f.name} is not symmetric; f is not standard")

    @property
    def dim(self):
        return self.pi.shape[0]

    def _rotate(self, A):
        U = self.spectral.eigenvectors
        return U.conj().T @ np.asarray(A, dtype=complex) @ U

    def _unrotate(self, A):
        U = self.spectral.eigenvectors
        return U @ A @ U.conj().T

    def apply(self, A):
        """``J_f|pi[A]``."""
        return self._unrotate(self.kernel * self._rotate(A))

    def apply_inverse(self, A):
        """``J_f^{-1}|pi[A]``."""
        return self._unrotate(self._rotate(A) / self.kernel)

    def scalar_product(self, A, B):
        """``K_f(A, B) = Tr[A J_f^{-1}[B]]`` (real part for Hermitian inputs)."""
        return float(np.real(np.trace(np.asarray(A) @ self.apply_inverse(B))))

    def information(self, drho):
        """Fisher information ``K_f(drho, drho)``."""
        return self.scalar_product(drho, drho)

    def as_superoperator(self, inverse=False):
        """Matrix of ``J_f`` (or its inverse) on column-stacked operators."""
        U = self.spectral.eigenvectors
        K = 1.0 / self.kernel if inverse else self.kernel
        to_eig = np.kron(U.T, U.conj().T)
        back = np.kron(U.conj(), U)
        return back @ (K.reshape(-1, order="F")[:, None] * to_eig)

    def power_superoperator(self, p):
        """Matrix of ``J_f^p`` (used for the symmetric similarity of recovery spectra)."""
        U = self.spectral.eigenvectors
        K = self.kernel ** p
        return np.kron(U.conj(), U) @ (K.reshape(-1, order="F")[:, None] * np.kron(U.T, U.conj().T))


def apply(f, pi, A):
    return FisherOperator(f, pi).apply(A)


def apply_inverse(f, pi, A):
    return FisherOperator(f, pi).apply_inverse(A)


def scalar_product(f, pi, A, B):
    return FisherOperator(f, pi).scalar_product(A, B)


def fisher_information(f, pi, drho):
    """``F_{f,pi}(drho) = Tr[drho J_f^{-1}|pi[drho]]``."""
    return FisherOperator(f, pi).information(drho)


def as_superoperator(f, pi, inverse=False):
    return FisherOperator(f, pi).as_superoperator(inverse)


def is_cp(f, pi, inverse=False):
    """Complete positivity of ``J_f|pi`` (or of its inverse).

    The map is a Schur multiplier in the eigenbasis of ``pi``, so it is CP
    exactly when the kernel matrix (or its entrywise reciprocal) is PSD.
    """
    J = FisherOperator(f, pi)
    K = 1.0 / J.kernel if inverse else J.kernel
    m = float(np.linalg.eigvalsh(K)[0])
    return CPReport(m >= -1e-10 * max(1.0, np.abs(K).max()), m)


def sld(f, pi, drho):
    """Generalized logarithmic derivative ``L_f`` solving ``J_f|pi[L_f] = drho``."""
    return hermitize(FisherOperator(f, pi).apply_inverse(drho))


def cramer_rao_bound(f, family, theta0, h=1e-5):
    """Reciprocal Fisher information of a one-parameter family at ``theta0``.

    The derivative is a central difference with step ``h``, symmetrized and
    projected onto traceless matrices.

    Raises
    ------
    UnidentifiableError
        When the Fisher information is below ``1e-14``.
    """
    rho0 = hermitize(family(theta0))
    d = rho0.shape[0]
    drho = hermitize((np.asarray(family(theta0 + h)) - np.asarray(family(theta0 - h))) / (2 * h))
    drho = drho - np.trace(drho) / d * np.eye(d)
    info = fisher_information(f, rho0, drho)
    if info < 1e-14:
        raise UnidentifiableError("Fisher information vanishes; parameter not identifiable")
    return 1.0 / info


def gibbs_state(H, beta):
    """``exp(-beta H) / Z``."""
    w, U = np.linalg.eigh(hermitize(H))
    p = np.exp(-beta * w - logsumexp(-beta * w))
    return (U * p) @ U.conj().T


def log_partition(H, beta):
    """``log Tr exp(-beta H)``."""
    return float(logsumexp(-beta * np.linalg.eigvalsh(hermitize(H))))


def log_partition_hessian(H, A, B, beta):
    """Mixed second derivative of ``log Z(H + xA + yB)`` at zero.

    Evaluated as ``beta^2 Tr[D(A) J_L|pi[D(B)]]`` with ``pi`` the Gibbs state of
    ``H`` at inverse temperature ``beta``, ``D(X) = X - Tr[X pi]`` and ``J_L``
    the Kubo-Mori operator.
    """
    pi = gibbs_state(H, beta)
    d = pi.shape[0]
    dA = np.asarray(A) - np.trace(np.asarray(A) @ pi) * np.eye(d)
    dB = np.asarray(B) - np.trace(np.asarray(B) @ pi) * np.eye(d)
    J = FisherOperator(kmb(), pi)
    return float(beta ** 2 * np.real(np.trace(dA @ J.apply(dB))))
