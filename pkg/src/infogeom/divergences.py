"""Contrast functions, chi-squared divergences, fidelities, geodesics and Chernoff bounds."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import RankError, SchemaError
from .fisher import fisher_information
from .linalg import EPS_RANK, eig_hermitian, hermitize, logm_pd, powm, sandwich_inverse, sqrtm_psd
from .monotones import bures, harmonic, l_transform, wigner_yanase


@dataclass(frozen=True)
class DivergenceResult:
    """Value of a divergence.

    ``value`` is ``None`` exactly when ``infinite`` is set: an unbounded
    divergence is reported as a state of the result rather than as ``inf``.
    """

    value: Optional[float]
    method: str = "coordinate"
    symmetric: bool = False
    infinite: bool = False

    def __float__(self):
        if self.infinite:
            raise ValueError("divergence is infinite")
        return float(self.value)


def _result(value, method, symmetric=False):
    return DivergenceResult(float(value), method, symmetric)


def _spectrum(rho):
    w, U = eig_hermitian(rho)
    return np.clip(w, 0.0, None), U


# ---------------------------------------------------------------------------
# contrast functions
# ---------------------------------------------------------------------------

def contrast(g, rho, sigma):
    """Contrast function ``H_g(rho || sigma) = sum_ij rho_i g(sigma_j/rho_i) |<sigma_j|rho_i>|^2``.

    Parameters
    ----------
    g : StandardConvex or callable
        Convex function with ``g(1) = 0``.
    rho : array_like
        Full-rank density matrix.
    sigma : array_like
        Density matrix; zero eigenvalues are allowed where ``g(0)`` is finite.
    """
    gf = g if callable(g) else None
    if gf is None:
        raise SchemaError("g must be callable")
    r, Ur = _spectrum(rho)
    s, Us = _spectrum(sigma)
    if r[0] <= EPS_RANK:
        raise RankError("contrast needs a full-rank first argument")
    overlap = np.abs(Us.conj().T @ Ur) ** 2          # [j, i] = |<sigma_j|rho_i>|^2
    ratio = s[:, None] / r[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        gval = np.asarray(gf(np.where(ratio > 0, ratio, 0.0)), dtype=float)
    live = overlap > 1e-14
    if np.any(~np.isfinite(gval) & live):
        return DivergenceResult(None, "coordinate", infinite=True)
    gval = np.where(live, gval, 0.0)
    return _result(np.sum(r[None, :] * gval * overlap), "coordinate")


def symmetrized_contrast(g, rho, sigma):
    """``(H_g(rho||sigma) + H_g(sigma||rho)) / 2``."""
    a, b = contrast(g, rho, sigma), contrast(g, sigma, rho)
    if a.infinite or b.infinite:
        return DivergenceResult(None, "coordinate", True, True)
    return _result(0.5 * (a.value + b.value), "coordinate", True)


def relative_entropy(rho, sigma):
    """Umegaki relative entropy ``Tr[rho (log rho - log sigma)]``."""
    r, _ = _spectrum(rho)
    pos = r > EPS_RANK
    ent = float(np.sum(r[pos] * np.log(r[pos])))
    try:
        cross = float(np.real(np.trace(hermitize(rho) @ logm_pd(sigma))))
    except RankError:
        return DivergenceResult(None, "closed_form", infinite=True)
    return _result(ent - cross, "closed_form")


def alpha_divergence(a, rho, sigma):
    """``H_a = (Tr[sigma^a rho^(1-a)] - 1) / (a (a - 1))``; ``a = 0`` is ``S(rho||sigma)``."""
    a = float(a)
    if a == 0.0:
        return relative_entropy(rho, sigma)
    if a == 1.0:
        return relative_entropy(sigma, rho)
    q = np.real(np.trace(powm(sigma, a) @ powm(rho, 1 - a)))
    return _result((q - 1) / (a * (a - 1)), "closed_form")


def renyi(a, rho, sigma):
    """Petz-Renyi divergence ``log Tr[rho^a sigma^(1-a)] / (a - 1)``."""
    a = float(a)
    if a == 1.0:
        return relative_entropy(rho, sigma)
    q = np.real(np.trace(powm(rho, a) @ powm(sigma, 1 - a)))
    return _result(np.log(q) / (a - 1), "closed_form")


def wy_contrast(rho, sigma):
    """``4 (1 - Tr[sqrt(rho) sqrt(sigma)])``."""
    c = np.real(np.trace(sqrtm_psd(rho) @ sqrtm_psd(sigma)))
    return _result(4 * (1 - c), "closed_form", True)


def bures_contrast(rho, sigma):
    """``Tr[(rho - sigma) (L_sigma + R_rho)^{-1} (rho - sigma)]``."""
    D = hermitize(rho) - hermitize(sigma)
    B = sandwich_inverse(sigma, rho, 1.0, D)
    return _result(np.real(np.trace(D @ B)), "closed_form", True)


def harmonic_contrast(rho, sigma):
    """``(Tr[sigma^2 rho^{-1}] - 1) / 2``."""
    s = hermitize(sigma)
    return _result(0.5 * (np.real(np.trace(s @ s @ powm(rho, -1))) - 1), "closed_form")


def sq_contrast(rho, sigma):
    """``Tr[sqrt(rho) (rho - sigma) sigma^{-1/2}]``."""
    D = hermitize(rho) - hermitize(sigma)
    return _result(np.real(np.trace(sqrtm_psd(rho) @ D @ powm(sigma, -0.5))), "closed_form")


def quantum_info_variance(rho, sigma):
    """``Tr[rho (log rho - log sigma)^2] / 2``."""
    X = logm_pd(rho) - logm_pd(sigma)
    return _result(0.5 * np.real(np.trace(hermitize(rho) @ X @ X)), "closed_form")


def chi2(f, rho, sigma):
    """``chi^2_f(rho||sigma) = Tr[(rho - sigma) J_f^{-1}|rho (rho - sigma)]``."""
    D = hermitize(rho) - hermitize(sigma)
    return _result(fisher_information(f, rho, D), "closed_form")


# ---------------------------------------------------------------------------
# fidelity, distances and geodesics
# ---------------------------------------------------------------------------

def fidelity(rho, sigma):
    """Root fidelity ``Tr sqrt(sqrt(rho) sigma sqrt(rho))`` (nuclear norm of ``sqrt(rho) sqrt(sigma)``)."""
    sv = np.linalg.svd(sqrtm_psd(rho) @ sqrtm_psd(sigma), compute_uv=False)
    return float(min(np.sum(sv), 1.0))


def bures_distance(rho, sigma):
    """Geodesic distance of the Bures metric, ``2 arccos F``."""
    return float(2 * np.arccos(np.clip(fidelity(rho, sigma), -1.0, 1.0)))


def bures_length(rho, sigma):
    """Chordal Bures length ``sqrt(2 (1 - F))``."""
    return float(np.sqrt(max(2 * (1 - fidelity(rho, sigma)), 0.0)))


def affinity(rho, sigma):
    """``Tr[sqrt(rho) sqrt(sigma)]``."""
    return float(np.real(np.trace(sqrtm_psd(rho) @ sqrtm_psd(sigma))))


def wy_distance(rho, sigma):
    """Geodesic distance of the Wigner-Yanase metric, ``2 arccos Tr[sqrt(rho) sqrt(sigma)]``."""
    return float(2 * np.arccos(np.clip(affinity(rho, sigma), -1.0, 1.0)))


def wy_geodesic_path(rho, sigma, t):
    """Point at parameter ``t`` on the Wigner-Yanase geodesic from ``rho`` to ``sigma``."""
    if not 0.0 <= t <= 1.0:
        raise SchemaError("t must lie in [0, 1]")
    A = (1 - t) * sqrtm_psd(rho) + t * sqrtm_psd(sigma)
    G = hermitize(A @ A)
    return G / np.real(np.trace(G))


def path_length(f, path, n_segments=1000):
    """Length of a curve of states under the Fisher metric of ``f``.

    Each segment contributes ``sqrt(F_{f, mid}(delta))`` with the metric taken at
    the parameter midpoint, which makes the sum second-order accurate.
    """
    ts = np.linspace(0.0, 1.0, n_segments + 1)
    pts = [path(t) for t in ts]
    total = 0.0
    for k in range(n_segments):
        mid = path(0.5 * (ts[k] + ts[k + 1]))
        total += np.sqrt(max(fisher_information(f, mid, pts[k + 1] - pts[k]), 0.0))
    return float(total)


def unnormalized_length(dtheta, r0, r1):
    """Squared geodesic length between ``r0 rho0`` and ``r1 rho1`` on positive operators.

    ``(dl)^2 = r0 + r1 - 2 sqrt(r0 r1) cos(dtheta)``, where ``dtheta`` is the
    normalized geodesic angle (half the geodesic distance).  Lengths are in the
    units in which ``dtheta^2 = K/4`` along the normalized path, so the same
    quarter-metric measures the unnormalized path.
    """
    if r0 <= 0 or r1 <= 0:
        raise SchemaError("r0 and r1 must be positive")
    if not 0.0 <= dtheta <= np.pi + 1e-12:
        raise SchemaError("dtheta must lie in [0, pi]")
    return float(r0 + r1 - 2 * np.sqrt(r0 * r1) * np.cos(dtheta))


def trace_distance(rho, sigma):
    """``Tr|rho - sigma|`` (orthogonal pure states are at distance 2)."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(hermitize(rho) - hermitize(sigma)))))


def symmetrized_ordering_check(g, rho, sigma, tol=1e-10):
    """Check ``H^symm_{L f_B} <= H^symm_g <= H^symm_{L f_H}``.

    Returns a dict with the three symmetrized values and the verdict.
    """
    lo = symmetrized_contrast(l_transform(bures()), rho, sigma).value
    mid = symmetrized_contrast(g, rho, sigma).value
    hi = symmetrized_contrast(l_transform(harmonic()), rho, sigma).value
    return {"lower": lo, "value": mid, "upper": hi,
            "ok": bool(lo <= mid + tol and mid <= hi + tol)}


# ---------------------------------------------------------------------------
# Chernoff
# ---------------------------------------------------------------------------

def _support_power(rho, s):
    w, U = np.linalg.eigh(hermitize(rho))
    p = np.where(w > EPS_RANK, np.clip(w, EPS_RANK, None) ** s, 0.0)
    return (U * p) @ U.conj().T


def chernoff_q(rho0, rho1, s):
    """``Tr[rho0^s rho1^(1-s)]``."""
    return float(np.real(np.trace(_support_power(rho0, s) @ _support_power(rho1, 1 - s))))


def chernoff_optimize(rho0, rho1, tol=1e-8):
    """Quantum Chernoff exponent ``max_s -log Tr[rho0^s rho1^(1-s)]`` over ``s`` in ``[0, 1]``.

    The objective is concave in ``s``; the maximum is located with scipy's
    bounded scalar minimizer (golden section with parabolic steps).

    Returns
    -------
    (s_star, xi)
    """
    res = minimize_scalar(lambda s: np.log(chernoff_q(rho0, rho1, s)),
                          bounds=(0.0, 1.0), method="bounded",
                          options={"xatol": tol})
    s_star = float(res.x)
    xi = -float(res.fun)
    for edge in (0.0, 1.0):
        val = -np.log(chernoff_q(rho0, rho1, edge))
        if val > xi:
            s_star, xi = edge, float(val)
    return s_star, max(xi, 0.0)


def chernoff_local(rho0, drho, eps):
    """Local Chernoff exponent ``eps^2 F_WY(drho) / 8``."""
    return eps ** 2 * fisher_information(wigner_yanase(), rho0, drho) / 8.0
