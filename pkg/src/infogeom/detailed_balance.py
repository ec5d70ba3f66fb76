"""Quantum detailed balance: adjoints, verdicts, structural synthesis and decomposition.

Generators are handled as column-stacked superoperator matrices.  Coordinates
"in the eigenbasis of pi" mean ``M[(g, h), (a, b)] = <g| L(|a><b|) |h>``, which
is the superoperator conjugated by ``kron(U^T, U^dagger)``.

Three notions are checked:

* Alicki: the Heisenberg generator is normal for ``K^o(A, B) = Tr[A B pi]``,
  its Hamiltonian part is skew and its dissipator self-adjoint.
* Fisher: the same three conditions in the Schroedinger picture for every
  ``K_{f, pi}``.  The universal quantifier reduces to the selection rule
  ``omega_out = +/- omega_in`` plus the condition at one ``f``; sampled
  monotones corroborate.
* Structural: jumps are modular eigenoperators with paired rates, optionally
  with a transpose term that only touches coherences.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import Lindbladian, canonical_form, dissipator_superop, gell_mann_basis, hamiltonian_superop
from .errors import DegeneracyError, DimensionError, RankError, SchemaError
from .fisher import FisherOperator
from .linalg import EPS_RANK, eig_hermitian, hermitize, matrix_to_json, right_mult_superop, vec
from .monotones import get_monotone

DEFAULT_F_SAMPLES = ("bures", "harmonic", "sqrt", "kmb", "wy", "alpha:0.3", "lambda:0.4")

#: verdict threshold on scaled residuals
DB_TOL = 1e-8

#: relative tolerance when bucketing log eigenvalue ratios into sectors
SECTOR_TOL = 1e-9


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _superop(L, t=0.0):
    if isinstance(L, Lindbladian):
        return L.superop(t)
    G = np.asarray(L, dtype=complex)
    d = int(round(np.sqrt(G.shape[0])))
    if G.ndim != 2 or G.shape != (d * d, d * d):
        raise DimensionError("generator must be a d^2 x d^2 matrix")
    return G


def _state(pi, d=None):
    pi = hermitize(pi)
    if d is not None and pi.shape[0] != d:
        raise DimensionError("reference state and generator differ in dimension")
    w, U = eig_hermitian(pi)
    if w[0] <= EPS_RANK:
        raise RankError("detailed balance needs a full-rank reference state")
    return pi, w, U


def _to_eigenbasis(U):
    return np.kron(U.T, U.conj().T)


def _scale(G):
    return max(1.0, float(np.linalg.norm(G)))


def _same(x, y):
    return abs(x - y) <= SECTOR_TOL * max(1.0, abs(x), abs(y))


def _check_nondegenerate(w):
    gaps = np.diff(w)
    if np.any(gaps <= SECTOR_TOL * max(1.0, w[-1])):
        raise DegeneracyError("reference state has a degenerate spectrum")


def split_generator(L, pi, picture="fisher"):
    """Split a generator into a Hamiltonian part ``U`` and a dissipator ``D = G - U``.

    ``U`` is fitted to the skew part of ``G`` under the scalar product of the
    chosen picture (``K_{f_B, pi}`` for ``"fisher"``, ``K^o`` on the Heisenberg
    generator for ``"alicki"``).  When ``G`` is detailed balanced this is the
    commutator with a Hamiltonian commuting with ``pi``; the fitted ``H`` is
    the canonical-form Hamiltonian of the skew part.

    Returns
    -------
    (H, U, D, residual)
        ``residual`` measures how far the skew part is from ``-i[H, .]``.
    """
    G = _superop(L)
    if picture == "fisher":
        skew = 0.5 * (G - fisher_adjoint(G, pi, "bures"))
    elif picture == "alicki":
        O = G.conj().T
        skew = 0.5 * (O - alicki_adjoint(O, pi)).conj().T
    else:
        raise SchemaError(f"unknown picture {picture!r}")
    try:
        H = canonical_form(skew).H
    except SchemaError:
        H = np.zeros((int(round(np.sqrt(G.shape[0]))),) * 2, dtype=complex)
    U = hamiltonian_superop(H)
    return H, U, G - U, float(np.linalg.norm(skew - U)) / _scale(G)


# ---------------------------------------------------------------------------
# adjoints
# ---------------------------------------------------------------------------

def alicki_adjoint(O, pi):
    """Adjoint of ``O`` for ``K^o(A, B) = Tr[A B pi]``: ``R_pi^{-1} O^dagger R_pi``."""
    O = _superop(O)
    d = int(round(np.sqrt(O.shape[0])))
    pi, w, U = _state(pi, d)
    R = right_mult_superop(pi)
    Rinv = right_mult_superop((U / w) @ U.conj().T)
    return Rinv @ O.conj().T @ R


def fisher_adjoint(O, pi, f):
    """Adjoint of ``O`` for ``K_{f, pi}``: ``J_f O^dagger J_f^{-1}``."""
    O = _superop(O)
    d = int(round(np.sqrt(O.shape[0])))
    _state(pi, d)
    J = FisherOperator(f, pi)
    return J.as_superoperator() @ O.conj().T @ J.as_superoperator(inverse=True)


def modular_operator(pi):
    """Superoperator of ``A -> pi A pi^{-1}``."""
    pi, w, U = _state(pi)
    return np.kron(((U / w) @ U.conj().T).T, pi)


def modular_commutator_norm(L, pi):
    """Frobenius norm of ``[G, L_pi R_pi^{-1}]``."""
    G = _superop(L)
    Delta = modular_operator(pi)
    if Delta.shape != G.shape:
        raise DimensionError("reference state and generator differ in dimension")
    return float(np.linalg.norm(G @ Delta - Delta @ G))


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------

@dataclass
class DBReport:
    """Detailed-balance verdicts with their residuals.

    Residuals are Frobenius norms divided by ``max(1, ||G||_F)``.
    """

    alicki_ok: bool
    alicki_residual: float
    alicki_parts: dict
    fisher_ok: bool
    fisher_residual: float
    fisher_parts: dict
    fisher_ok_per_f: dict
    modular_commutator_norm: float
    structural: Optional[dict] = None
    tolerance: float = DB_TOL

    def verdict_line(self):
        word = {True: "PASS", False: "FAIL"}
        return f"fisher: {word[self.fisher_ok]}, alicki: {word[self.alicki_ok]}"

    def to_dict(self):
        out = {
            "verdicts": {"alicki": self.alicki_ok, "fisher": self.fisher_ok},
            "tolerance": self.tolerance,
            "alicki": {"residual": self.alicki_residual, **self.alicki_parts},
            "fisher": {"residual": self.fisher_residual, **self.fisher_parts,
                       "per_f": self.fisher_ok_per_f},
            "modular_commutator_norm": self.modular_commutator_norm,
        }
        if self.structural is not None:
            out["structural"] = structural_table(self.structural)
        return out

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def alicki_residuals(L, pi):
    """Residuals of the three Alicki conditions (normality, skew Hamiltonian, self-adjoint dissipator)."""
    G = _superop(L)
    H, U, D, fit = split_generator(G, pi, "alicki")
    s = _scale(G)
    Gh, Uh, Dh = G.conj().T, U.conj().T, D.conj().T
    return {
        "hamiltonian_form": fit,
        "hamiltonian_commutator": float(np.linalg.norm(H @ pi - pi @ H)),
        "normality": float(np.linalg.norm(Gh @ alicki_adjoint(Gh, pi) - alicki_adjoint(Gh, pi) @ Gh)) / s,
        "hamiltonian_skew": float(np.linalg.norm(alicki_adjoint(Uh, pi) + Uh)) / s,
        "dissipator_self_adjoint": float(np.linalg.norm(alicki_adjoint(Dh, pi) - Dh)) / s,
    }


def fisher_residuals(L, pi, f):
    """Residuals of the three Fisher conditions for a single monotone."""
    G = _superop(L)
    _, U, D, _ = split_generator(G, pi, "fisher")
    s = _scale(G)
    Gt = fisher_adjoint(G, pi, f)
    return {
        "normality": float(np.linalg.norm(G @ Gt - Gt @ G)) / s,
        "hamiltonian_skew": float(np.linalg.norm(fisher_adjoint(U, pi, f) + U)) / s,
        "dissipator_self_adjoint": float(np.linalg.norm(fisher_adjoint(D, pi, f) - D)) / s,
    }


def _omega_table(w):
    return np.log(w[:, None] / w[None, :])


def selection_residuals(L, pi):
    """Exact test of the Fisher condition for every monotone at once.

    Returns the largest dissipator coordinate that breaks the rule
    ``omega(out) = +/- omega(in)``, the Bures-kernel condition on the remaining
    coordinates, the fit of the skew part to ``-i[H, .]``, the commutator
    ``||[H, pi]||`` and the normality residual ``||[U, D]||``.
    """
    G = _superop(L)
    d = int(round(np.sqrt(G.shape[0])))
    pi, w, Uv = _state(pi, d)
    H, U, D, fit = split_generator(G, pi, "fisher")
    s = _scale(G)
    S = _to_eigenbasis(Uv)
    M = S @ D @ S.conj().T
    om = _omega_table(w).reshape(-1, order="F")          # omega of |a><b| at index a + d b
    tol = SECTOR_TOL * max(1.0, np.abs(om).max())
    allowed = (np.abs(om[:, None] - om[None, :]) <= tol) | (np.abs(om[:, None] + om[None, :]) <= tol)
    rule = float(np.max(np.abs(M[~allowed]), initial=0.0)) / s
    k = np.asarray(get_monotone("bures").mean(w[:, None], w[None, :])).reshape(-1, order="F")
    cond = M * k[None, :] - k[:, None] * M.conj().T
    cond = float(np.linalg.norm(np.where(allowed, cond, 0.0))) / s
    return {
        "hamiltonian_form": fit,
        "selection_rule": rule,
        "kernel_condition": cond,
        "hamiltonian_commutator": float(np.linalg.norm(H @ pi - pi @ H)),
        "normality": float(np.linalg.norm(U @ D - D @ U)) / s,
    }


def is_alicki_db(L, pi, tol=DB_TOL):
    """Alicki detailed balance; returns ``(verdict, residual, parts)``."""
    parts = alicki_residuals(L, pi)
    res = max(parts.values())
    return bool(res < tol), res, parts


def is_fisher_db(L, pi, f_samples=DEFAULT_F_SAMPLES, tol=DB_TOL):
    """Fisher detailed balance for every standard monotone.

    The verdict needs the exact selection-rule test and every sampled ``f`` to
    pass.  Returns ``(verdict, residual, parts, per_f)``.
    """
    parts = selection_residuals(L, pi)
    per_f = {}
    for f in f_samples:
        name = get_monotone(f).name if not isinstance(f, str) else f
        per_f[name] = max(fisher_residuals(L, pi, f).values())
    res = max(list(parts.values()) + list(per_f.values()))
    return bool(res < tol), res, parts, per_f


def db_report(L, pi, f_samples=DEFAULT_F_SAMPLES, tol=DB_TOL, decompose=True):
    """Full :class:`DBReport`; the structural decomposition is attached when it exists."""
    a_ok, a_res, a_parts = is_alicki_db(L, pi, tol)
    f_ok, f_res, f_parts, per_f = is_fisher_db(L, pi, f_samples, tol)
    structural = None
    if decompose and f_ok:
        try:
            structural = structural_decompose(L, pi, tol=tol)
        except (DegeneracyError, SchemaError):
            structural = None
    return DBReport(a_ok, a_res, a_parts, f_ok, f_res, f_parts, per_f,
                    modular_commutator_norm(L, pi), structural, tol)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def _sector_operator(terms, w, U):
    """``sum c |g><a|`` in the eigenbasis of pi, with the common omega of its terms."""
    d = w.size
    A = np.zeros((d, d), dtype=complex)
    omega = None
    for term in terms:
        try:
            g, a, c = term
            g, a = int(g), int(a)
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"sector term must be (row, column, coefficient): {term!r}") from exc
        if not (0 <= g < d and 0 <= a < d):
            raise SchemaError(f"sector index out of range: {term!r}")
        om = float(np.log(w[g] / w[a]))
        if omega is None:
            omega = om
        elif not _same(om, omega):
            raise SchemaError("all terms of a sector must share the same omega")
        A[g, a] += complex(c)
    if omega is None:
        raise SchemaError("empty sector")
    return U @ A @ U.conj().T, omega


def _parse_sector(sector):
    if isinstance(sector, dict):
        return sector.get("terms", []), float(sector.get("rate", sector.get("weight", 0.0)))
    terms, rate = sector
    return terms, float(rate)


def _check_hamiltonian(H, pi, d):
    if H is None:
        return np.zeros((d, d), dtype=complex)
    H = hermitize(H)
    if H.shape != (d, d):
        raise DimensionError("Hamiltonian dimension differs from pi")
    if np.linalg.norm(H @ pi - pi @ H) > 1e-10 * max(1.0, np.linalg.norm(H)):
        raise SchemaError("the Hamiltonian must commute with pi")
    return H - np.trace(H) / d * np.eye(d)


def build_db_lindbladian(pi, sectors, H=None):
    """Detailed-balanced generator assembled from modular eigenoperators.

    Parameters
    ----------
    pi : array_like
        Full-rank state with non-degenerate spectrum.
    sectors : sequence
        Each sector is ``{"terms": [(g, a, c), ...], "rate": lam}`` with indices
        in the eigenbasis of ``pi`` (ascending eigenvalues).  The jump
        ``A = sum c |g><a|`` lowers or raises by ``omega = log(pi_g / pi_a)``,
        shared by all terms.  The partner ``A^dagger`` is added with rate
        ``exp(-omega) lam``; for ``omega = 0`` it is added only when
        ``A`` is not Hermitian, with the same rate.
    H : array_like, optional
        Hamiltonian commuting with ``pi``.

    Raises
    ------
    DegeneracyError
        If ``pi`` is degenerate.
    SchemaError
        For negative rates, mixed-omega sectors, traceful jumps or a
        Hamiltonian that does not commute with ``pi``.
    """
    pi, w, U = _state(pi)
    _check_nondegenerate(w)
    d = w.size
    jumps, rates = [], []
    for sector in sectors:
        terms, lam = _parse_sector(sector)
        if lam < 0:
            raise SchemaError("structural rates must be non-negative")
        A, omega = _sector_operator(terms, w, U)
        if abs(np.trace(A)) > 1e-12 * max(1.0, np.linalg.norm(A)):
            raise SchemaError("jump operators must be traceless")
        if np.linalg.norm(pi @ A - np.exp(omega) * A @ pi) > 1e-10 * max(1.0, np.linalg.norm(A)):
            raise SchemaError("jump is not a modular eigenoperator")
        jumps.append(A)
        rates.append(lam)
        Ad = A.conj().T
        if omega != 0.0 or np.linalg.norm(Ad - A) > 1e-14:
            jumps.append(Ad)
            rates.append(np.exp(-omega) * lam)
    return Lindbladian(_check_hamiltonian(H, pi, d), jumps, rates, strict=False)


def transpose_superop(pi):
    """Superoperator of the transpose taken in the eigenbasis of ``pi``."""
    pi, w, U = _state(pi)
    d = w.size
    P = np.zeros((d * d, d * d))
    for a in range(d):
        for b in range(d):
            P[b + d * a, a + d * b] = 1.0
    S = _to_eigenbasis(U)
    return S.conj().T @ P @ S


def build_fisher_db_extra(pi, sectors, mu_sectors, H=None, tol=1e-12):
    """Generator with the transpose term ``sum mu_i B_i rho^T B_i^dagger``.

    Parameters
    ----------
    pi, sectors, H
        As in :func:`build_db_lindbladian`.
    mu_sectors : sequence
        Groups of ``{"terms": [...], "weight": mu}`` entries.  Every group
        shares one ``omega``.  Within a group ``sum_i mu_i B_i^dagger B_i = 0``
        is required, which makes the term trace annihilating and implies
        ``sum_i mu_i = 0`` when the ``B_i^dagger B_i`` coincide.  Each group
        with ``omega != 0`` is paired with the adjoint group, weights scaled
        by ``exp(-omega)``.

    Returns
    -------
    numpy.ndarray
        Generator superoperator.
    """
    L = build_db_lindbladian(pi, sectors, H)
    pi, w, U = _state(pi)
    G = L.superop()
    T = transpose_superop(pi)
    for group in mu_sectors:
        ops, omega = [], None
        for entry in group:
            terms, mu = _parse_sector(entry)
            B, om = _sector_operator(terms, w, U)
            if omega is not None and not _same(om, omega):
                raise SchemaError("all weights of a transpose group must share omega")
            omega = om
            ops.append((B, mu))
        if not ops:
            continue
        mus = np.array([mu for _, mu in ops])
        balance = sum(mu * B.conj().T @ B for B, mu in ops)
        if np.linalg.norm(balance) > tol * max(1.0, np.abs(mus).max()):
            raise SchemaError("transpose group is not trace annihilating: sum mu B^dagger B != 0")
        group_ops = list(ops)
        if omega != 0.0:
            group_ops += [(B.conj().T, np.exp(-omega) * mu) for B, mu in ops]
        for B, mu in group_ops:
            G = G + mu * np.kron(B.conj(), B) @ T
    return G


def fisher_only_counterexample(beta=1.0):
    """Qubit generator that is Fisher but not Alicki detailed balanced.

    ``pi = diag(1, e^{-beta}) / (1 + e^{-beta})``, ``H = 0`` and a single jump
    ``A = |0><1| + e^{-beta/2} |1><0|`` with unit rate.

    Returns
    -------
    (Lindbladian, pi)
    """
    pi = np.diag([1.0, np.exp(-beta)]) / (1.0 + np.exp(-beta))
    A = np.array([[0.0, 1.0], [np.exp(-beta / 2), 0.0]], dtype=complex)
    return Lindbladian(np.zeros((2, 2)), [A], [1.0], strict=False), pi


def classical_embedding(R):
    """Lindbladian with jumps ``|i><j|`` at rates ``a_{i<-j}`` for a classical rate matrix."""
    R = np.asarray(R, dtype=float)
    d = R.shape[0]
    jumps, rates = [], []
    for i in range(d):
        for j in range(d):
            if i != j and R[i, j] != 0.0:
                E = np.zeros((d, d), dtype=complex)
                E[i, j] = 1.0
                jumps.append(E)
                rates.append(R[i, j])
    return Lindbladian(np.zeros((d, d)), jumps, rates, strict=False)


# ---------------------------------------------------------------------------
# structural decomposition
# ---------------------------------------------------------------------------

def _eigenoperator_basis(w, U, traceless):
    """Orthonormal modular eigenoperators with their omegas, in the lab frame."""
    d = w.size
    ops, omegas = [], []
    for g in range(d):
        for a in range(d):
            if g != a or not traceless:
                E = np.zeros((d, d), dtype=complex)
                E[g, a] = 1.0
                ops.append(E)
                omegas.append(float(np.log(w[g] / w[a])))
    if traceless:
        for F in gell_mann_basis(d)[d * (d - 1):]:
            ops.append(F)
            omegas.append(0.0)
    return [U @ F @ U.conj().T for F in ops], np.array(omegas)


def _coefficients(G, ops):
    n = len(ops)
    c = np.empty((n, n), dtype=complex)
    for m in range(n):
        for k in range(n):
            c[m, k] = np.vdot(np.kron(ops[k].conj(), ops[m]), G)
    return c


def _sectors_of(omegas):
    labels = []
    for om in omegas:
        for lab in labels:
            if _same(lab, om):
                break
        else:
            labels.append(om)
    groups = {}
    for lab in sorted(labels):
        groups[lab] = [i for i, om in enumerate(omegas) if _same(lab, om)]
    return groups


def _diagonalize_sectors(c, ops, omegas, cutoff):
    """Per-sector eigen-decomposition; negative sectors reuse the adjoints of positive ones."""
    out = {}
    groups = _sectors_of(omegas)
    for om, idx in groups.items():
        if om < 0 and any(_same(-om, o) for o in groups):
            continue
        block = c[np.ix_(idx, idx)]
        block = 0.5 * (block + block.conj().T)
        vals, vecs = eig_hermitian(block)
        entries = []
        for v, col in zip(vals, vecs.T):
            if abs(v) > cutoff:
                entries.append((float(v), sum(x * ops[i] for x, i in zip(col, idx))))
        out[om] = entries
    for om, idx in groups.items():
        if not (om < 0 and any(_same(-om, o) for o in groups)):
            continue
        pos = next(o for o in groups if _same(-om, o))
        block = c[np.ix_(idx, idx)]
        entries = []
        for _, A in out[pos]:
            Ad = A.conj().T
            coords = np.array([np.vdot(ops[i], Ad) for i in idx])
            entries.append((float(np.real(np.vdot(coords, block @ coords))), Ad))
        out[om] = entries
    return {om: ent for om, ent in sorted(out.items()) if ent}


def _pair_ratio(sectors):
    """Largest ``|w^omega - e^omega w^{-omega}|`` over paired sectors."""
    worst = 0.0
    for om, entries in sectors.items():
        partner = next((o for o in sectors if om > 0 and _same(o, -om)), None)
        if partner is None:
            continue
        for (vp, _), (vm, _) in zip(entries, sectors[partner]):
            worst = max(worst, abs(vp - np.exp(om) * vm))
    return worst


def structural_decompose(L, pi, tol=DB_TOL):
    """Sector decomposition of a Fisher detailed-balanced generator.

    Returns
    -------
    dict
        ``H``, ``jump_sectors`` and ``transpose_sectors`` mapping omega to lists of
        ``(rate, operator)``, the condition residuals and the resynthesis residual.

    Raises
    ------
    DegeneracyError
        If ``pi`` is degenerate.
    SchemaError
        If the generator does not admit the structural form within ``tol``.
    """
    G = _superop(L)
    d = int(round(np.sqrt(G.shape[0])))
    pi, w, U = _state(pi, d)
    _check_nondegenerate(w)
    H, _, D, _ = split_generator(G, pi, "fisher")
    s = _scale(G)
    cutoff = 1e-12 * s

    ops, omegas = _eigenoperator_basis(w, U, traceless=True)
    c = _coefficients(D, ops)
    same = np.array([[_same(a, b) for b in omegas] for a in omegas])
    c_block = np.where(same, c, 0.0)
    jump_sectors = _diagonalize_sectors(c_block, ops, omegas, cutoff)

    D_struct = np.zeros_like(G)
    for om, entries in jump_sectors.items():
        for lam, A in entries:
            D_struct = D_struct + dissipator_superop(A, lam)
    T = transpose_superop(pi)
    extra = (D - D_struct) @ T
    full_ops, full_omegas = _eigenoperator_basis(w, U, traceless=False)
    t = _coefficients(extra, full_ops)
    transpose_sectors = _diagonalize_sectors(t, full_ops, full_omegas, cutoff)

    synth = hamiltonian_superop(H) + D_struct
    for entries in transpose_sectors.values():
        for mu, B in entries:
            synth = synth + mu * np.kron(B.conj(), B) @ T
    resynthesis = float(np.linalg.norm(synth - G)) / s

    rate_ratio = _pair_ratio(jump_sectors) / s
    mu_ratio = _pair_ratio(transpose_sectors) / s
    min_rate = min((lam for ent in jump_sectors.values() for lam, _ in ent), default=0.0)
    mu_sum = max((abs(sum(mu for mu, _ in ent)) / s for ent in transpose_sectors.values()), default=0.0)
    residuals = {
        "resynthesis": resynthesis,
        "rate_ratio": rate_ratio,
        "mu_ratio": mu_ratio,
        "mu_sum": mu_sum,
        "hamiltonian_commutator": float(np.linalg.norm(H @ pi - pi @ H)),
        "negative_rate": max(0.0, -min_rate / s),
    }
    bad = {k: v for k, v in residuals.items() if v > tol}
    if bad:
        raise SchemaError(f"generator has no detailed-balance structure: {bad}")
    return {"H": H, "jump_sectors": jump_sectors, "transpose_sectors": transpose_sectors,
            "residuals": residuals}


def resynthesize(decomposition, pi):
    """Generator superoperator rebuilt from :func:`structural_decompose` output."""
    G = hamiltonian_superop(decomposition["H"])
    for entries in decomposition["jump_sectors"].values():
        for lam, A in entries:
            G = G + dissipator_superop(A, lam)
    T = transpose_superop(pi)
    for entries in decomposition["transpose_sectors"].values():
        for mu, B in entries:
            G = G + mu * np.kron(B.conj(), B) @ T
    return G


def structural_table(decomposition):
    """JSON-ready sector table."""
    def rows(sectors):
        return [{"omega": om, "weight": val, "operator": matrix_to_json(A)}
                for om, entries in sectors.items() for val, A in entries]
    return {"H": matrix_to_json(decomposition["H"]),
            "jumps": rows(decomposition["jump_sectors"]),
            "transpose": rows(decomposition["transpose_sectors"]),
            "residuals": decomposition["residuals"]}


def steady_state_residual(L, pi):
    """``||L(pi)||_F``."""
    G = _superop(L)
    return float(np.linalg.norm(G @ vec(hermitize(pi))))
