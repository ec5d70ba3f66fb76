"""Quantum channels, GKLS generators, classical rate matrices and Fisher-information flow.

Superoperators act on column-stacked operators (see :func:`infogeom.linalg.vec`).
Evolutions are specified by their generators; propagators are derived from them.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import expm
from scipy.optimize import brentq

from .errors import DimensionError, SchemaError, StepSizeError, UnsupportedMeasureError
from .fisher import FisherOperator
from .linalg import (
    apply_superop, eig_hermitian, hermitize, matrix_from_json, matrix_to_json,
    random_density, random_tangent, sandwich_inverse, sandwich_superop,
    superop_from_function, unvec, vec, _rng, ginibre,
)
from .monotones import get_monotone

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


# ---------------------------------------------------------------------------
# channels
# ---------------------------------------------------------------------------

class QuantumChannel:
    """Linear map between operator spaces, stored as a superoperator matrix.

    Parameters
    ----------
    superop : array_like, optional
        ``d_out^2 x d_in^2`` matrix acting on column-stacked operators.
    kraus : sequence of array_like, optional
        Kraus operators ``K_i``; the map is ``rho -> sum_i K_i rho K_i^dagger``.
    """

    def __init__(self, superop=None, kraus=None):
        if (superop is None) == (kraus is None):
            raise SchemaError("give exactly one of superop or kraus")
        if kraus is not None:
            kraus = [np.asarray(K, dtype=complex) for K in kraus]
            shapes = {K.shape for K in kraus}
            if len(shapes) != 1:
                raise DimensionError("Kraus operators differ in shape")
            superop = sum(sandwich_superop(K) for K in kraus)
        S = np.asarray(superop, dtype=complex)
        d_out, d_in = int(round(np.sqrt(S.shape[0]))), int(round(np.sqrt(S.shape[1])))
        if d_out ** 2 != S.shape[0] or d_in ** 2 != S.shape[1]:
            raise DimensionError(f"superoperator shape {S.shape} is not (d_out^2, d_in^2)")
        self.superop = S
        self.kraus = kraus
        self.d_in, self.d_out = d_in, d_out
        self._choi = None

    @property
    def dim(self):
        return self.d_in

    def __call__(self, rho):
        return self.apply(rho)

    def apply(self, rho):
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (self.d_in, self.d_in):
            raise DimensionError(f"channel acts on {self.d_in}x{self.d_in}, got {rho.shape}")
        return unvec(self.superop @ vec(rho), self.d_out)

    def choi(self):
        """Unnormalized Choi matrix ``sum_ij |i><j| (x) Phi(|i><j|)`` (input factor first)."""
        if self._choi is None:
            d = self.d_in
            C = np.zeros((d * self.d_out, d * self.d_out), dtype=complex)
            for i in range(d):
                for j in range(d):
                    E = np.zeros((d, d), dtype=complex)
                    E[i, j] = 1.0
                    C += np.kron(E, self.apply(E))
            self._choi = C
        return self._choi

    def trace_preservation_error(self):
        adj = self.adjoint().apply(np.eye(self.d_out))
        return float(np.linalg.norm(adj - np.eye(self.d_in)))

    def min_choi_eigenvalue(self):
        return float(np.linalg.eigvalsh(hermitize(self.choi()))[0])

    def is_cptp(self, tol=1e-10):
        return self.trace_preservation_error() < tol and self.min_choi_eigenvalue() >= -tol

    def adjoint(self):
        """Hilbert-Schmidt adjoint ``Phi^dagger``."""
        return QuantumChannel(self.superop.conj().T)

    def compose(self, other):
        """``self o other`` (``other`` acts first)."""
        if other.d_out != self.d_in:
            raise DimensionError("channel dimensions do not chain")
        return QuantumChannel(self.superop @ other.superop)

    def tensor_with_identity(self, d_anc):
        """``Phi (x) id`` on system (first factor) times a ``d_anc``-dimensional ancilla."""
        d, do, da = self.d_in, self.d_out, int(d_anc)

        def act(X):
            X4 = X.reshape(d, da, d, da)
            Y = np.zeros((do, da, do, da), dtype=complex)
            for a in range(da):
                for b in range(da):
                    Y[:, a, :, b] = self.apply(X4[:, a, :, b])
            return Y.reshape(do * da, do * da)

        if do != d:
            raise DimensionError("tensor_with_identity needs a square channel")
        return QuantumChannel(superop_from_function(act, d * da))

    def to_kraus(self, tol=1e-12):
        """Kraus operators from the Choi eigendecomposition (CP maps only)."""
        w, V = np.linalg.eigh(hermitize(self.choi()))
        if w[0] < -1e-10:
            raise SchemaError("map is not completely positive; no Kraus form")
        ops = []
        for k in np.nonzero(w > tol)[0]:
            # Choi column (i, o) -> K[o, i]
            ops.append(np.sqrt(w[k]) * V[:, k].reshape(self.d_in, self.d_out).T)
        return ops

    def is_positive_probe(self, trials=500, seed=None):
        """Most negative output eigenvalue over sampled pure and mixed inputs."""
        rng = _rng(seed)
        worst = np.inf
        for k in range(trials):
            rank = 1 if k % 2 == 0 else None
            rho = random_density(self.d_in, rank=rank, seed=rng)
            worst = min(worst, float(np.linalg.eigvalsh(hermitize(self.apply(rho)))[0]))
        return worst


def identity_channel(d):
    return QuantumChannel(np.eye(d * d, dtype=complex))


def unitary_channel(U):
    return QuantumChannel(kraus=[U])


def transpose_map(d):
    """Transposition, the standard positive but not completely positive map."""
    return QuantumChannel(superop_from_function(lambda X: X.T, d))


def depolarizing(lam, d=2):
    """``rho -> (1 - lam) rho + lam Tr[rho] 1/d``."""
    def act(X):
        return (1 - lam) * X + lam * np.trace(X) * np.eye(d) / d
    return QuantumChannel(superop_from_function(act, d))


def amplitude_damping(gamma):
    """Qubit amplitude damping with decay probability ``gamma`` (|1> decays to |0>)."""
    K0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    K1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return QuantumChannel(kraus=[K0, K1])


def classical_channel(P):
    """Stochastic map on diagonal states: ``P[i, j]`` is the probability of ``j -> i``.

    Kraus operators ``sqrt(P[i, j]) |i><j|`` also dephase off-diagonal input.
    """
    P = np.asarray(P, dtype=float)
    if np.any(P < -1e-15) or np.max(np.abs(P.sum(axis=0) - 1)) > 1e-12:
        raise SchemaError("P must be column stochastic")
    n_out, n_in = P.shape
    ops = []
    for i in range(n_out):
        for j in range(n_in):
            K = np.zeros((n_out, n_in), dtype=complex)
            K[i, j] = np.sqrt(max(P[i, j], 0.0))
            ops.append(K)
    return QuantumChannel(kraus=ops)


def random_stochastic(d, seed=None):
    """Column-stochastic matrix with Dirichlet(1) columns."""
    rng = _rng(seed)
    return rng.dirichlet(np.ones(d), size=d).T


def random_channel(d, n_kraus=None, seed=None):
    """Random CPTP map from a Haar-like isometry ``d -> n_kraus * d``."""
    rng = _rng(seed)
    k = d if n_kraus is None else int(n_kraus)
    Q, R = np.linalg.qr(ginibre(k * d, d, rng))
    Q = Q * (np.diag(R) / np.abs(np.diag(R)))
    return QuantumChannel(kraus=[Q[i * d:(i + 1) * d, :] for i in range(k)])


def apply(channel, rho):
    return channel.apply(rho)


def compose(a, b):
    return a.compose(b)


def adjoint(channel):
    return channel.adjoint()


def tensor_with_identity(channel, d_anc):
    return channel.tensor_with_identity(d_anc)


def choi(channel):
    return channel.choi()


def is_cptp(channel, tol=1e-10):
    return channel.is_cptp(tol)


def is_positive_probe(channel, trials=500, seed=None):
    return channel.is_positive_probe(trials, seed)


# ---------------------------------------------------------------------------
# GKLS generators
# ---------------------------------------------------------------------------

def gell_mann_basis(d):
    """Traceless Hilbert-Schmidt-orthonormal basis of ``d x d`` matrices.

    Order: symmetric off-diagonal, antisymmetric off-diagonal (both by ``(j, k)``
    with ``j < k``), then diagonal.  For ``d = 2`` this is ``sigma_{x,y,z}/sqrt(2)``.
    """
    out = []
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    for j, k in pairs:
        E = np.zeros((d, d), dtype=complex)
        E[j, k] = E[k, j] = 1 / np.sqrt(2)
        out.append(E)
    for j, k in pairs:
        E = np.zeros((d, d), dtype=complex)
        E[j, k], E[k, j] = -1j / np.sqrt(2), 1j / np.sqrt(2)
        out.append(E)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        out.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(complex))
    return out


def dissipator_superop(A, rate=1.0):
    """Superoperator of ``rho -> rate (A rho A^dagger - {A^dagger A, rho}/2)``."""
    A = np.asarray(A, dtype=complex)
    d = A.shape[0]
    AdA = A.conj().T @ A
    I = np.eye(d)
    return rate * (np.kron(A.conj(), A) - 0.5 * np.kron(I, AdA) - 0.5 * np.kron(AdA.T, I))


def hamiltonian_superop(H):
    """Superoperator of ``rho -> -i [H, rho]``."""
    H = np.asarray(H, dtype=complex)
    I = np.eye(H.shape[0])
    return -1j * (np.kron(I, H) - np.kron(H.T, I))


class Lindbladian:
    """Generator in diagonal GKLS form, optionally time dependent.

    Parameters
    ----------
    H : array_like
        Hamiltonian (used when no schedule is given, or as the schedule default).
    jumps : sequence of array_like
        Jump operators; traceless, and orthonormal when ``strict``.
    rates : sequence of float
        Rates, with no sign constraint.
    schedule : callable, optional
        ``t -> (H_t, rates_t)``; either entry may be ``None`` to keep the fixed value.
    strict : bool
        Enforce the orthonormality of the jumps.
    """

    def __init__(self, H, jumps, rates, schedule=None, strict=True, schedule_table=None):
        self.H = hermitize(H)
        self.d = self.H.shape[0]
        self.jumps = [np.asarray(A, dtype=complex) for A in jumps]
        self.rates = np.asarray(rates, dtype=float).reshape(-1)
        if len(self.jumps) != self.rates.size:
            raise SchemaError("jumps and rates differ in number")
        for A in self.jumps:
            if A.shape != (self.d, self.d):
                raise DimensionError("jump operator dimension differs from H")
            if abs(np.trace(A)) > 1e-10:
                raise SchemaError("jump operators must be traceless")
        if strict and self.jumps:
            G = np.array([[np.vdot(A, B) for B in self.jumps] for A in self.jumps])
            if np.max(np.abs(G - np.eye(len(self.jumps)))) > 1e-10:
                raise SchemaError("jump operators must be Hilbert-Schmidt orthonormal")
        self.schedule = schedule
        self.schedule_table = schedule_table

    @property
    def time_dependent(self):
        return self.schedule is not None

    def at(self, t):
        """Hamiltonian and rates at time ``t``."""
        if self.schedule is None:
            return self.H, self.rates
        H, rates = self.schedule(t)
        H = self.H if H is None else hermitize(H)
        rates = self.rates if rates is None else np.asarray(rates, dtype=float)
        return H, rates

    def superop(self, t=0.0):
        H, rates = self.at(t)
        G = hamiltonian_superop(H)
        for A, r in zip(self.jumps, rates):
            G = G + dissipator_superop(A, r)
        return G

    def propagator(self, t, dt=1e-3):
        """Superoperator of the evolution from 0 to ``t``."""
        if not self.time_dependent:
            return expm(self.superop() * t)
        n = max(1, int(np.ceil(abs(t) / dt)))
        return _rk4_superop(self.superop, 0.0, t, n, self.d)

    def to_json(self):
        obj = {"H": matrix_to_json(self.H),
               "jumps": [matrix_to_json(A) for A in self.jumps],
               "rates": self.rates.tolist()}
        if self.schedule_table is not None:
            obj["schedule"] = self.schedule_table
        return obj

    @classmethod
    def from_json(cls, obj, strict=True):
        """Parse ``{"H", "jumps", "rates"}`` with an optional ``"schedule"`` table.

        The schedule is ``{"t": [...], "rates": [[...], ...]}``; rates are
        interpolated linearly and held constant outside the table.
        """
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            H, _ = matrix_from_json(obj["H"], hermitian=True)
            jumps = [matrix_from_json(A)[0] for A in obj.get("jumps", [])]
            rates = np.asarray(obj.get("rates", []), dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed generator JSON: {exc}") from exc
        table = None
        if "schedule" in obj:
            table = obj["schedule"]
            try:
                ts = np.asarray(table["t"], dtype=float)
                rs = np.asarray(table["rates"], dtype=float)
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaError(f"malformed schedule: {exc}") from exc
            if rs.ndim != 2 or rs.shape != (ts.size, len(jumps)) or np.any(np.diff(ts) <= 0):
                raise SchemaError("schedule must list increasing times and one rate per jump")

            def schedule(t, ts=ts, rs=rs):
                return None, np.array([np.interp(t, ts, rs[:, k]) for k in range(rs.shape[1])])
            return cls(H, jumps, rates, schedule=schedule, strict=strict, schedule_table=table)
        return cls(H, jumps, rates, strict=strict)


def generator_superop(L, t=0.0):
    return L.superop(t)


def canonical_form(G, tol=1e-8):
    """Diagonal GKLS form of a generator superoperator.

    The generator is expanded as ``sum_mn c_mn F_m rho F_n^dagger`` over the basis
    ``F_0 = 1/sqrt(d)`` plus :func:`gell_mann_basis`.  The traceless block of
    ``c`` (the Kossakowski matrix) is diagonalized into rates and jumps, and the
    Hamiltonian is read off the mixed block.

    Raises
    ------
    SchemaError
        If ``G`` is not Hermiticity preserving or not trace annihilating.
    """
    G = np.asarray(G, dtype=complex)
    d = int(round(G.shape[0] ** 0.5))
    if G.shape != (d * d, d * d):
        raise DimensionError("generator must be a d^2 x d^2 matrix")
    F = [np.eye(d, dtype=complex) / np.sqrt(d)] + gell_mann_basis(d)
    n = len(F)
    c = np.empty((n, n), dtype=complex)
    for m in range(n):
        for k in range(n):
            B = np.kron(F[k].conj(), F[m])
            c[m, k] = np.vdot(B, G)
    scale = max(1.0, np.abs(c).max())
    if np.max(np.abs(c - c.conj().T)) > tol * scale:
        raise SchemaError("generator is not Hermiticity preserving")
    c = 0.5 * (c + c.conj().T)
    trace_map = G.conj().T @ vec(np.eye(d))
    if np.linalg.norm(trace_map) > tol * scale:
        raise SchemaError("generator does not annihilate the trace")
    Fop = sum(c[k, 0] * F[k] for k in range(1, n)) / np.sqrt(d)
    H = hermitize(0.5j * (Fop - Fop.conj().T))
    kossakowski = c[1:, 1:]
    rates, V = eig_hermitian(kossakowski)
    jumps = [sum(V[k, a] * F[k + 1] for k in range(n - 1)) for a in range(n - 1)]
    rates = np.where(np.abs(rates) < 1e-14, 0.0, rates)
    return Lindbladian(H, jumps, rates)


def kossakowski_matrix(G):
    """Kossakowski coefficient matrix of a generator in the Gell-Mann basis."""
    L = canonical_form(G)
    V = np.array([[np.vdot(F, A) for A in L.jumps] for F in gell_mann_basis(L.d)])
    return V @ np.diag(L.rates) @ V.conj().T


def _rk4_superop(gen, t0, t1, n, d):
    h = (t1 - t0) / n
    P = np.eye(d * d, dtype=complex)
    t = t0
    for _ in range(n):
        k1 = gen(t) @ P
        k2 = gen(t + h / 2) @ (P + h / 2 * k1)
        k3 = gen(t + h / 2) @ (P + h / 2 * k2)
        k4 = gen(t + h) @ (P + h * k3)
        P = P + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
    return P


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

class DepolarizingFamily(Lindbladian):
    """Qubit depolarizing evolution ``rho -> (1 - lam_t) rho + lam_t 1/2``.

    ``kind="markov"`` uses ``lam_t = 1 - exp(-t)``; ``kind="nonmarkov"`` uses
    ``lam_t = 1 - exp(-t) cos 2t``.  The generator has jumps ``sigma_k/sqrt(2)``
    with common rate ``gamma_t / 2``, ``gamma_t = -d/dt log(1 - lam_t)``; in the
    non-Markovian case it diverges where ``cos 2t = 0``, so the propagator is
    always the closed-form channel.
    """

    def __init__(self, kind="markov"):
        if kind not in ("markov", "nonmarkov"):
            raise SchemaError("kind must be 'markov' or 'nonmarkov'")
        self.kind = kind
        super().__init__(np.zeros((2, 2)), [P / np.sqrt(2) for P in PAULI], [0.5, 0.5, 0.5],
                         schedule=lambda t: (None, np.full(3, 0.5 * self.gamma(t))))

    def survival(self, t):
        """``1 - lam_t``."""
        if self.kind == "markov":
            return np.exp(-t)
        return np.exp(-t) * np.cos(2 * t)

    def survival_derivative(self, t):
        if self.kind == "markov":
            return -np.exp(-t)
        return -np.exp(-t) * (np.cos(2 * t) + 2 * np.sin(2 * t))

    def lam(self, t):
        return 1.0 - self.survival(t)

    def gamma(self, t):
        return -self.survival_derivative(t) / self.survival(t)

    def channel(self, t):
        return depolarizing(self.lam(t), 2)

    def propagator(self, t, dt=None):
        return self.channel(t).superop


def depolarizing_family(kind="markov"):
    return DepolarizingFamily(kind)


def amplitude_damping_generator(gamma=1.0):
    """Qubit decay ``|1> -> |0>`` with jump ``|0><1|`` at rate ``gamma``."""
    A = np.array([[0, 1], [0, 0]], dtype=complex)
    return Lindbladian(np.zeros((2, 2)), [A], [gamma])


def preset(name):
    """Named evolutions: ``depolarizing-markov``, ``depolarizing-nonmarkov``, ``amplitude-damping``.

    A colon may replace the first hyphen (``depolarizing:markov``).
    """
    name = str(name).strip().lower().replace(":", "-")
    table = {
        "depolarizing-markov": lambda: DepolarizingFamily("markov"),
        "depolarizing-nonmarkov": lambda: DepolarizingFamily("nonmarkov"),
        "amplitude-damping": amplitude_damping_generator,
    }
    if name not in table:
        raise SchemaError(f"unknown preset {name!r}; choose from {sorted(table)}")
    return table[name]()


# ---------------------------------------------------------------------------
# integration
# ---------------------------------------------------------------------------

@dataclass
class Trajectory:
    times: np.ndarray
    states: list


def evolve(L, rho0, T, dt, rehermitize=True, trace_tol=1e-6):
    """Fixed-step RK4 integration of the master equation.

    Raises
    ------
    StepSizeError
        If the trace drifts by more than ``trace_tol``.
    """
    if dt <= 0 or T < 0:
        raise SchemaError("need dt > 0 and T >= 0")
    rho = np.asarray(rho0, dtype=complex)
    if rho.shape != (L.d, L.d):
        raise DimensionError("initial state does not match the generator dimension")
    n = int(round(T / dt))
    tr0 = np.trace(rho).real
    v = vec(rho)
    times, states = [0.0], [rho.copy()]
    for k in range(n):
        t = k * dt
        g1, g2, g3 = L.superop(t), L.superop(t + dt / 2), L.superop(t + dt)
        k1 = g1 @ v
        k2 = g2 @ (v + dt / 2 * k1)
        k3 = g2 @ (v + dt / 2 * k2)
        k4 = g3 @ (v + dt * k3)
        v = v + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        rho = unvec(v, L.d)
        if rehermitize:
            rho = hermitize(rho)
            v = vec(rho)
        drift = abs(np.trace(rho).real - tr0)
        if drift > trace_tol:
            raise StepSizeError(f"trace drifted by {drift:.2e} at t={t + dt:.4g}; reduce dt")
        times.append((k + 1) * dt)
        states.append(rho.copy())
    return Trajectory(np.array(times), states)


# ---------------------------------------------------------------------------
# Fisher information flow
# ---------------------------------------------------------------------------

def _commutator(A, B):
    return A @ B - B @ A


def jump_current(f, A, pi, drho, n=None):
    """Current ``I_A`` of one jump operator (always non-positive).

    ``I = -2 int dN(s) (Tr[pi C_s^dagger C_s] + s Tr[pi D_s^dagger D_s])`` with
    ``C_s = [A, B_s^dagger]``, ``D_s = [A, B_s]`` and
    ``B_s = (L_pi + s R_pi)^{-1}[drho]``.
    """
    f = get_monotone(f)
    if not f.has_measure:
        raise UnsupportedMeasureError(
            f"{f.name} has no integral measure; use the finite-difference derivative instead")
    s_nodes, weights = f.measure.nodes() if n is None else f.measure.nodes(n)
    total = 0.0
    for s, w in zip(s_nodes, weights):
        B = sandwich_inverse(pi, pi, s, drho)
        C = _commutator(A, B.conj().T)
        D = _commutator(A, B)
        val = np.trace(pi @ C.conj().T @ C).real
        if s > 0:
            val += s * np.trace(pi @ D.conj().T @ D).real
        total += w * val
    return -2.0 * total


def flux_currents(f, L, t, pi, drho):
    """Per-jump currents and rates at time ``t``.

    Returns
    -------
    dict
        ``rates``, ``currents`` and ``derivative = sum rates * currents``.
    """
    _, rates = L.at(t)
    currents = np.array([jump_current(f, A, pi, drho) for A in L.jumps])
    return {"rates": np.asarray(rates, dtype=float), "currents": currents,
            "derivative": float(np.dot(rates, currents))}


@dataclass
class FluxReport:
    """Fisher information along an evolution, with analytic and numerical derivatives."""

    f: str
    times: np.ndarray
    fisher: np.ndarray
    derivative_fd: np.ndarray
    derivative_analytic: Optional[np.ndarray] = None
    rates: Optional[np.ndarray] = None
    currents: Optional[np.ndarray] = None
    notes: list = field(default_factory=list)

    def max_relative_error(self, floor=1e-12):
        if self.derivative_analytic is None:
            raise UnsupportedMeasureError("no analytic derivative for this monotone")
        a, b = self.derivative_analytic, self.derivative_fd
        return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), floor)))

    def to_csv(self, header_lines=()):
        """CSV text with columns ``t, F_f, F'_analytic, F'_fd, rate_k..., current_k...``."""
        buf = io.StringIO()
        for line in header_lines:
            buf.write(f"# {line}\n")
        n_jumps = 0 if self.rates is None else self.rates.shape[1]
        cols = ["t", "F_f", "F'_analytic", "F'_fd"]
        cols += [f"rate_{k}" for k in range(n_jumps)] + [f"current_{k}" for k in range(n_jumps)]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for i, t in enumerate(self.times):
            ana = np.nan if self.derivative_analytic is None else self.derivative_analytic[i]
            row = [t, self.fisher[i], ana, self.derivative_fd[i]]
            if n_jumps:
                row += list(self.rates[i]) + list(self.currents[i])
            w.writerow(["%.17g" % x for x in row])
        return buf.getvalue()


def _state_at(L, x0, t, dt):
    return apply_superop(L.propagator(t, dt), x0)


def fisher_at(f, L, pi0, drho0, t, dt=1e-3):
    """``F_{f,t} = K_{f, pi_t}(drho_t, drho_t)`` along the evolution."""
    P = L.propagator(t, dt)
    return FisherOperator(f, hermitize(apply_superop(P, pi0))).information(
        hermitize(apply_superop(P, drho0)))


def richardson_derivative(func, t, h=1e-3, lower=None):
    """Central difference at steps ``h`` and ``h/2`` combined to fourth order.

    When ``t - h`` falls below ``lower`` the five-point forward formula (also
    fourth order) is used instead, so the evolution is never run backwards.
    """
    if lower is not None and t - h < lower:
        f0, f1, f2, f3, f4 = (func(t + k * h) for k in range(5))
        return (-25 * f0 + 48 * f1 - 36 * f2 + 16 * f3 - 3 * f4) / (12 * h)

    def central(step):
        return (func(t + step) - func(t - step)) / (2 * step)
    return (4 * central(h / 2) - central(h)) / 3


def fisher_trajectory(f, pi0, drho0, L, times, h=1e-3, dt=1e-3):
    """Fisher information, its flux decomposition and a finite-difference check.

    Propagators are exact for time-independent generators (matrix exponential)
    and for :class:`DepolarizingFamily`; otherwise RK4 with step ``dt``.  When
    ``f`` has no measure the analytic columns are omitted and a note is added.
    """
    f = get_monotone(f)
    times = np.asarray(times, dtype=float)
    F = np.array([fisher_at(f, L, pi0, drho0, t, dt) for t in times])
    fd = np.array([richardson_derivative(lambda s: fisher_at(f, L, pi0, drho0, s, dt), t, h, lower=0.0)
                   for t in times])
    report = FluxReport(f.name, times, F, fd)
    if not f.has_measure:
        report.notes.append(f"{f.name}: no integral measure; per-jump currents unavailable")
        return report
    rates, currents, ana = [], [], []
    for t in times:
        P = L.propagator(t, dt)
        pi = hermitize(apply_superop(P, pi0))
        dr = hermitize(apply_superop(P, drho0))
        out = flux_currents(f, L, t, pi, dr)
        rates.append(out["rates"])
        currents.append(out["currents"])
        ana.append(out["derivative"])
    report.derivative_analytic = np.array(ana)
    report.rates = np.array(rates)
    report.currents = np.array(currents)
    return report


def sign_changes(values, tol=0.0):
    """Number of sign changes in a sequence, ignoring entries with ``|v| <= tol``."""
    signs = [np.sign(v) for v in values if abs(v) > tol]
    return int(sum(1 for a, b in zip(signs, signs[1:]) if a != b))


def count_roots(func, a, b, n=4001):
    """Number of sign changes of ``func`` on ``[a, b]``, each refined with Brent's method."""
    xs = np.linspace(a, b, n)
    ys = np.array([func(x) for x in xs])
    roots = []
    for x0, x1, y0, y1 in zip(xs, xs[1:], ys, ys[1:]):
        if y0 == 0.0:
            roots.append(x0)
        elif y0 * y1 < 0:
            roots.append(brentq(func, x0, x1, xtol=1e-14))
    return roots


# ---------------------------------------------------------------------------
# Markovianity
# ---------------------------------------------------------------------------

def _extended(L, d_anc):
    I = np.eye(d_anc)
    H, _ = L.at(0.0)
    ext_jumps = [np.kron(A, I) / np.sqrt(d_anc) for A in L.jumps]
    base = L

    def schedule(t):
        Ht, rt = base.at(t)
        return np.kron(Ht, I), np.asarray(rt) * d_anc

    return Lindbladian(np.kron(H, I), ext_jumps, np.asarray(L.rates) * d_anc,
                       schedule=schedule, strict=False)


def fisher_expansion_search(L, times, f="bures", trials=200, d_anc=None, seed=None):
    """Look for ``(t, pi, drho)`` on system (x) ancilla where the Fisher information grows.

    Uses the exact flux derivative ``sum_k rate_k I_k``; a positive value is a
    witness of non-Markovianity.
    """
    rng = _rng(seed)
    d_anc = L.d if d_anc is None else d_anc
    Lx = _extended(L, d_anc)
    D = L.d * d_anc
    best = {"found": False, "derivative": -np.inf}
    for t in times:
        _, rates = L.at(t)
        if np.all(np.asarray(rates) >= 0):
            continue
        for _ in range(trials):
            pi = random_density(D, seed=rng)
            dr = random_tangent(D, seed=rng)
            val = flux_currents(f, Lx, t, pi, dr)["derivative"]
            if val > best["derivative"]:
                best = {"found": val > 1e-12, "derivative": float(val), "t": float(t)}
            if best["found"]:
                return best
    return best


def markov_report(L, T, n_grid=201, trials=50, seed=0, exclude=None, tol=1e-9):
    """Markovianity verdict from canonical rates, with a Fisher-expansion witness search.

    Parameters
    ----------
    L : Lindbladian
    T : float
        Horizon; rates are sampled on ``n_grid`` points of ``[0, T]``.
    exclude : callable, optional
        Predicate on ``t`` marking grid points to skip (e.g. generator poles).
    tol : float
        Rates above ``-tol`` count as non-negative; below ``-1e-6`` (or
        ``-tol`` if larger) the verdict is non-Markovian, in between inconclusive.
    """
    grid = np.linspace(0.0, T, n_grid)
    if exclude is not None:
        grid = np.array([t for t in grid if not exclude(t)])
    min_rate, witness = np.inf, None
    for t in grid:
        rates = canonical_form(L.superop(t)).rates
        k = int(np.argmin(rates))
        if rates[k] < min_rate:
            min_rate, witness = float(rates[k]), {"t": float(t), "index": k, "rate": float(rates[k])}
    if min_rate >= -tol:
        verdict = "MARKOVIAN"
    elif min_rate < -max(1e-6, tol):
        verdict = "NON-MARKOVIAN"
    else:
        verdict = "INCONCLUSIVE"
    report = {"verdict": verdict, "min_rate": min_rate, "rate_witness": witness}
    if verdict != "MARKOVIAN":
        neg = [t for t in grid if np.min(canonical_form(L.superop(t)).rates) < -1e-6][:5]
        report["fisher_witness"] = fisher_expansion_search(L, neg, trials=trials, seed=seed)
    else:
        report["fisher_witness"] = {"found": False}
    return report


def converse_probe(channel, f="bures", trials=10_000, seed=None, d_anc=None):
    """Search for Fisher expansion under ``channel (x) id``, following the converse construction.

    Each trial draws an interior state ``pi`` mapped to a positive definite
    output and a state ``sigma`` whose image is not positive, moves along the
    segment between them until the smallest output eigenvalue is ``eta``, and
    perturbs along the corresponding output eigenvector (commuting with the image).

    Returns
    -------
    dict
        ``found``, ``trials`` used and the witness values when found.
    """
    rng = _rng(seed)
    d_anc = channel.d_in if d_anc is None else d_anc
    ext = channel.tensor_with_identity(d_anc)
    D = ext.d_in
    S_inv = np.linalg.pinv(ext.superop)

    def out_min(rho):
        return float(np.linalg.eigvalsh(hermitize(ext.apply(rho)))[0])

    for trial in range(1, trials + 1):
        pi = 0.8 * np.eye(D) / D + 0.2 * random_density(D, seed=rng)
        if out_min(pi) <= 0:
            continue
        sigma = random_density(D, rank=1, seed=rng)
        if out_min(sigma) >= 0:
            continue
        lam_star = brentq(lambda x: out_min((1 - x) * pi + x * sigma), 0.0, 1.0, xtol=1e-15)
        eta = 10 ** rng.uniform(-6, -3)
        lam = brentq(lambda x: out_min((1 - x) * pi + x * sigma) - eta, 0.0, lam_star, xtol=1e-15)
        rho = (1 - lam) * pi + lam * sigma
        out = hermitize(ext.apply(rho))
        w, U = np.linalg.eigh(out)
        c = np.full(D, -1.0 / (D - 1))
        c[0] = 1.0
        d_out = (U * c) @ U.conj().T
        drho = hermitize(unvec(S_inv @ vec(d_out), D))
        before = FisherOperator(f, rho).information(drho)
        after = FisherOperator(f, out).information(d_out)
        if after > before * (1 + 1e-9):
            return {"found": True, "trials": trial, "before": before, "after": after,
                    "eta": float(w[0])}
    return {"found": False, "trials": trials}


# ---------------------------------------------------------------------------
# classical stochastic dynamics
# ---------------------------------------------------------------------------

def check_rate_matrix(R, tol=1e-12):
    R = np.asarray(R, dtype=float)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise SchemaError("rate matrix must be square")
    if np.max(np.abs(R.sum(axis=0))) > tol * max(1.0, np.abs(R).max()):
        raise SchemaError("rate matrix columns must sum to zero")
    return R


def rate_matrix(a):
    """Rate matrix from off-diagonal rates ``a[i, j] = a_{i<-j}``; diagonal set to minus column sums."""
    a = np.array(a, dtype=float)
    np.fill_diagonal(a, 0.0)
    return a - np.diag(a.sum(axis=0))


def rate_decompose(R):
    """Off-diagonal rates ``a[i, j] = a_{i<-j}`` (zero diagonal)."""
    R = check_rate_matrix(R)
    a = R.copy()
    np.fill_diagonal(a, 0.0)
    return a


def is_classical_markov(rate_matrices, tol=1e-9):
    """True when every off-diagonal rate on the grid is non-negative."""
    return bool(all(np.all(rate_decompose(R) >= -tol) for R in rate_matrices))


def classical_db_check(R, pi, tol=1e-10):
    """Detailed balance ``a_{i<-j} pi_j = a_{j<-i} pi_i``, also checked as ``R J = J R^T``."""
    a = rate_decompose(R)
    pi = np.asarray(pi, dtype=float)
    if np.any(pi <= 0):
        raise SchemaError("pi must be strictly positive")
    flux = a * pi[None, :]
    pair = float(np.max(np.abs(flux - flux.T)))
    J = np.diag(pi)
    R = np.asarray(R, dtype=float)
    op = float(np.linalg.norm(R @ J - J @ R.T))
    return {"holds": bool(pair < tol and op < tol), "pair_residual": pair, "operator_residual": op}


def trace_distance_derivative(R, drho):
    """Right derivative of ``sum_i |drho_i|`` under ``d drho/dt = R drho``.

    Entries that vanish contribute ``|(R drho)_i|``, the rest
    ``sign(drho_i) (R drho)_i``.
    """
    R = np.asarray(R, dtype=float)
    drho = np.asarray(drho, dtype=float)
    v = R @ drho
    nz = drho != 0
    return float(np.sum(np.sign(drho[nz]) * v[nz]) + np.sum(np.abs(v[~nz])))


def trace_distance_derivative_sign_sum(R, drho):
    """``sum_{i != j} a_{j<-i} drho_i (sign drho_j - sign drho_i)`` (valid for traceless, nowhere-zero ``drho``)."""
    a = rate_decompose(R)
    s = np.sign(np.asarray(drho, dtype=float))
    drho = np.asarray(drho, dtype=float)
    return float(np.sum(a.T * drho[:, None] * (s[None, :] - s[:, None])))


def negative_rate_counterexample(a12=-0.3, a21=1.0, n_sweep=201):
    """Two-level rates with ``a_{1<-2} < 0`` that still contract every traceless vector.

    Returns
    -------
    dict
        ``R``, the worst traceless derivative over a sweep of ``drho = (x, -x)``
        (both signs of ``x``), the derivative for the traceful vector ``e_2``,
        and the witness from embedding in three levels with ``drho = (0, 1, -1)``.
    """
    a = np.array([[0.0, a12], [a21, 0.0]])
    R = rate_matrix(a)
    xs = np.concatenate([-np.linspace(1, 1e-3, n_sweep), np.linspace(1e-3, 1, n_sweep)])
    traceless = [trace_distance_derivative(R, [x, -x]) for x in xs]
    R3 = np.zeros((3, 3))
    R3[:2, :2] = R
    embedded = np.array([0.0, 1.0, -1.0])
    return {
        "R": R,
        "negative_rate": bool(a12 < 0),
        "max_traceless_derivative": float(max(traceless)),
        "traceful_derivative": trace_distance_derivative(R, [0.0, 1.0]),
        "embedded_R": R3,
        "embedded_vector": embedded,
        "embedded_derivative": trace_distance_derivative(R3, embedded),
    }
