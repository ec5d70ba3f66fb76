"""Generalized Petz recovery maps ``J_f'|pi o Phi^dagger o J_f^{-1}|Phi(pi)`` and recovery bounds."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .divergences import contrast, trace_distance
from .dynamics import QuantumChannel, fisher_at, richardson_derivative
from .errors import RankError, SchemaError
from .fisher import FisherOperator, is_cp
from .linalg import EPS_RANK, hermitize, sandwich_superop
from .monotones import get_monotone, is_below, l_transform, sqrt_monotone


@dataclass
class RecoveryMap:
    """A generalized Petz map with its provenance.

    ``cp_flag`` is ``"guaranteed"`` when both Fisher factors are CP (so the map
    is CP for every channel), ``"observed"`` when only this instance has a
    positive semidefinite Choi matrix, and ``"violated"`` otherwise.
    """

    channel: QuantumChannel
    fprime: object
    f: object
    pi: np.ndarray
    cp_flag: str

    @property
    def superop(self):
        return self.channel.superop

    def __call__(self, X):
        return self.channel.apply(X)

    def round_trip(self, forward):
        """Superoperator of ``recovery o forward``."""
        return self.channel.superop @ forward.superop


def _channel(Phi):
    return Phi if isinstance(Phi, QuantumChannel) else QuantumChannel(np.asarray(Phi))


def petz_map(fprime, f, pi, Phi):
    """``J_f'|pi o Phi^dagger o J_f^{-1}|Phi(pi)``.

    Raises
    ------
    RankError
        If ``pi`` or ``Phi(pi)`` is not full rank.
    """
    Phi = _channel(Phi)
    fprime, f = get_monotone(fprime), get_monotone(f)
    pi = hermitize(pi)
    out = hermitize(Phi.apply(pi))
    if np.linalg.eigvalsh(out)[0] <= EPS_RANK:
        raise RankError("Phi(pi) is not full rank; the recovery map is undefined")
    Jp = FisherOperator(fprime, pi)
    Jf = FisherOperator(f, out)
    S = Jp.as_superoperator() @ Phi.superop.conj().T @ Jf.as_superoperator(inverse=True)
    R = QuantumChannel(S)
    if is_cp(fprime, pi).cp and is_cp(f, out, inverse=True).cp:
        flag = "guaranteed"
    elif R.min_choi_eigenvalue() >= -1e-10:
        flag = "observed"
    else:
        flag = "violated"
    return RecoveryMap(R, fprime, f, pi, flag)


def duality_residual(fprime, f, pi, Phi, A, B):
    """``|K_{f,Phi(pi)}(Phi A, Phi B) - K_{f',pi}(A, R Phi B)|``."""
    Phi = _channel(Phi)
    R = petz_map(fprime, f, pi, Phi)
    lhs = FisherOperator(f, Phi.apply(pi)).scalar_product(Phi.apply(A), Phi.apply(B))
    rhs = FisherOperator(fprime, pi).scalar_product(A, R(Phi.apply(B)))
    return abs(lhs - rhs)


def _similarity_form(fprime, f, pi, Phi):
    # J_f'^{1/2} Phi^dag J_f^{-1} Phi J_f'^{1/2}: Hermitian, similar to R Phi
    Phi = _channel(Phi)
    Jp = FisherOperator(fprime, pi)
    Jf = FisherOperator(f, Phi.apply(pi))
    half = Jp.power_superoperator(0.5)
    M = half @ Phi.superop.conj().T @ Jf.as_superoperator(inverse=True) @ Phi.superop @ half
    return hermitize(M), M


def recovery_spectrum(fprime, f, pi, Phi, require_order=True):
    """Spectrum of ``R Phi`` via the symmetric similarity ``J_f'^{-1/2} (R Phi) J_f'^{1/2}``.

    Returns
    -------
    dict
        ``eigenvalues`` (ascending), ``hermiticity`` residual of the similarity
        form, ``max_imag`` of the direct eigenvalues of ``R Phi`` and
        ``prior_residual`` of ``R Phi(pi) = pi``.

    Raises
    ------
    SchemaError
        When ``require_order`` and ``fprime <= f`` fails on the grid.
    """
    fprime, f = get_monotone(fprime), get_monotone(f)
    if require_order and not is_below(fprime, f):
        raise SchemaError(f"{fprime.name} <= {f.name} fails on the grid")
    Phi = _channel(Phi)
    H, M = _similarity_form(fprime, f, pi, Phi)
    R = petz_map(fprime, f, pi, Phi)
    direct = np.linalg.eigvals(R.round_trip(Phi))
    prior = np.linalg.norm(R(Phi.apply(pi)) - pi)
    return {"eigenvalues": np.linalg.eigvalsh(H),
            "hermiticity": float(np.linalg.norm(M - M.conj().T)),
            "max_imag": float(np.max(np.abs(direct.imag))),
            "prior_residual": float(prior)}


def involution_check(f, fprime, pi, Phi):
    """``|| P_{(f, f'), Phi(pi)}(P_{(f', f), pi}(Phi)) - Phi ||``."""
    Phi = _channel(Phi)
    R = petz_map(fprime, f, pi, Phi)
    back = petz_map(f, fprime, Phi.apply(pi), R.channel)
    return float(np.linalg.norm(back.superop - Phi.superop))


def composition_check(f, fmid, fprime, pi, Phi_s, Phi_ts):
    """Residual of ``P_{(f',f),pi}(Phi_ts o Phi_s) = P_{(f',f''),pi}(Phi_s) o P_{(f'',f),Phi_s(pi)}(Phi_ts)``."""
    Phi_s, Phi_ts = _channel(Phi_s), _channel(Phi_ts)
    whole = petz_map(fprime, f, pi, Phi_ts.compose(Phi_s))
    first = petz_map(fprime, fmid, pi, Phi_s)
    second = petz_map(fmid, f, Phi_s.apply(pi), Phi_ts)
    return float(np.linalg.norm(whole.superop - first.superop @ second.superop))


def _complex_power(A, z):
    w, U = np.linalg.eigh(hermitize(A))
    if w[0] <= EPS_RANK:
        raise RankError("complex powers need a full-rank state")
    return (U * np.exp(z * np.log(w))) @ U.conj().T


def rotated_petz(Phi, sigma, t, s=None):
    """Rotated Petz map ``V_sigma(1/2 - i t) o Phi^dagger o V_{Phi(sigma)}(i s - 1/2)``.

    ``V_pi(z)[A] = pi^z A (pi^z)^dagger``; ``s`` defaults to ``t``.  Each factor
    is a single-Kraus map, so the result is CP, and it is trace preserving.
    """
    Phi = _channel(Phi)
    s = t if s is None else s
    sigma = hermitize(sigma)
    P1 = _complex_power(sigma, 0.5 - 1j * t)
    P2 = _complex_power(Phi.apply(sigma), 1j * s - 0.5)
    S = sandwich_superop(P1) @ Phi.superop.conj().T @ sandwich_superop(P2)
    return RecoveryMap(QuantumChannel(S), f"rotated:{t}", f"rotated:{s}", sigma, "guaranteed")


def chi2_recovery_gap(fprime, f, rho, sigma, Phi):
    """Terms of the chi-squared recovery chain.

    With ``Delta = rho - sigma`` and ``X = (1 - R Phi) Delta``::

        chi2_f'(rho||sigma) - chi2_f(Phi rho||Phi sigma) = Tr[Delta J_f'^{-1}|rho X]
                                                        >= F_{f',rho}(X) >= ||X||_1^2

    Returns
    -------
    dict
        ``lhs`` (difference of divergences), ``identity`` (the trace form),
        ``mid``, ``rhs`` and ``holds``.
    """
    fprime, f = get_monotone(fprime), get_monotone(f)
    if not is_below(fprime, f):
        raise SchemaError(f"{fprime.name} <= {f.name} fails on the grid")
    Phi = _channel(Phi)
    rho, sigma = hermitize(rho), hermitize(sigma)
    D = rho - sigma
    Jp = FisherOperator(fprime, rho)
    out = Phi.apply(rho)
    lhs = Jp.information(D) - FisherOperator(f, out).information(Phi.apply(D))
    R = petz_map(fprime, f, rho, Phi)
    X = D - R(Phi.apply(D))
    ident = Jp.scalar_product(D, X)
    mid = Jp.information(hermitize(X))
    rhs = trace_distance(hermitize(X), np.zeros_like(X)) ** 2
    tol = 1e-9
    holds = abs(lhs - ident) < tol * max(1.0, abs(lhs)) and lhs >= mid - tol and mid >= rhs - tol
    return {"lhs": float(lhs), "identity": float(ident), "mid": float(mid),
            "rhs": float(rhs), "holds": bool(holds)}


def retrodiction_trajectory(fprime, f, pi, drho, L, times, h=1e-3):
    """Retrieval divergence ``H_{g(f')}(pi + drho || R_t Phi_t (pi + drho))`` along an evolution.

    ``g(f') = (x - 1)^2 / (2 f'(x))`` is the convex function whose local
    expansion is ``K_{f', pi}``.  Both the exact contrast value and its
    quadratic form ``Tr[Y J_f'^{-1}|pi Y] / 2``, ``Y = (1 - R_t Phi_t) drho``,
    are reported, together with the Fisher information ``F_{f,t}`` of the
    evolved perturbation and whether it is expanding.
    """
    fprime, f = get_monotone(fprime), get_monotone(f)
    pi, drho = hermitize(pi), hermitize(drho)
    g = l_transform(fprime)
    Jp = FisherOperator(fprime, pi)

    def quadratic(t):
        Phi = QuantumChannel(L.propagator(t))
        R = petz_map(fprime, f, pi, Phi)
        Y = hermitize(drho - R(Phi.apply(drho)))
        return 0.5 * Jp.information(Y), Y

    rows = []
    for t in times:
        q, Y = quadratic(t)
        exact = contrast(g, pi + drho, pi + drho - Y)
        fisher = fisher_at(f, L, pi, drho, t)
        dF = richardson_derivative(lambda s: fisher_at(f, L, pi, drho, s), t, h, lower=0.0)
        dQ = richardson_derivative(lambda s: quadratic(s)[0], t, h, lower=0.0)
        rows.append({"t": float(t), "fisher_f": fisher, "fisher_derivative": float(dF),
                     "retrieval_divergence": float(exact.value) if not exact.infinite else np.inf,
                     "retrieval_quadratic": float(q), "retrieval_derivative": float(dQ),
                     "expansion_flag": bool(dF > 0)})
    return rows


def retrodiction_csv(rows, header_lines=()):
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "fisher_f", "retrieval_divergence", "expansion_flag"])
    for r in rows:
        w.writerow(["%.17g" % r["t"], "%.17g" % r["fisher_f"], "%.17g" % r["retrieval_divergence"],
                    int(r["expansion_flag"])])
    return buf.getvalue()


DEFAULT_CP_PRIMES = ("harmonic", "sqrt", "alpha:-0.5", "alpha:2")
DEFAULT_CP_FS = ("bures", "kmb", "wy", "alpha:0.3", "sqrt")


def petz_supremum_check(pi, Phi, pairs=None):
    """Spectral dominance of the Petz map over other recoveries with CP factors.

    For each pair ``(f', f)`` with ``J_f'`` and ``J_f^{-1}`` CP (hence
    ``f' <= sqrt <= f``), the sorted spectrum of ``R_{(f',f)} Phi`` is compared
    entrywise with that of ``R_P Phi``, both from the Hermitian similarity form.

    Returns
    -------
    dict
        ``min_gap`` over all pairs (non-negative when the Petz map dominates)
        and per-pair ``gaps``.
    """
    Phi = _channel(Phi)
    pi = hermitize(pi)
    out = Phi.apply(pi)
    if pairs is None:
        pairs = [(a, b) for a in DEFAULT_CP_PRIMES for b in DEFAULT_CP_FS]
    sq = sqrt_monotone()
    top = np.sort(np.linalg.eigvalsh(_similarity_form(sq, sq, pi, Phi)[0]))
    gaps = {}
    for fp, ff in pairs:
        fp, ff = get_monotone(fp), get_monotone(ff)
        if not (is_cp(fp, pi).cp and is_cp(ff, out, inverse=True).cp):
            continue
        ev = np.sort(np.linalg.eigvalsh(_similarity_form(fp, ff, pi, Phi)[0]))
        gaps[(fp.name, ff.name)] = float(np.min(top - ev))
    return {"min_gap": min(gaps.values()) if gaps else 0.0, "gaps": gaps}
