"""Command-line front end.

Every subcommand reads JSON inputs (or a named preset), writes a JSON or CSV
report and exits with the code of the library error it hit: 2 for malformed
input, 3 for rank problems, 4 for unsupported operations and 5 when a check
fails under ``--assert``.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from . import detailed_balance as db
from . import divergences as dv
from . import dynamics as dyn
from . import recovery as rc
from .errors import InfogeomError, SchemaError, UnsupportedMeasureError, VerdictError
from .fisher import cramer_rao_bound, fisher_information, gibbs_state
from .linalg import matrix_from_json, matrix_to_json, random_density, random_tangent
from .monotones import LOG_GRID, bures, catalog, get_monotone, harmonic, normalization

DEFAULT_TOLERANCES = {
    "db": db.DB_TOL,
    "flux": 1e-4,
    "recovery": 1e-9,
    "markov": 1e-9,
    "geodesic": 1e-3,
    "garden": 1e-9,
}

GENERATOR_PRESETS = ("depolarizing:markov", "depolarizing:nonmarkov", "amplitude-damping")
DB_PRESETS = ("fisher-only",)
MARKOV_PRESETS = GENERATOR_PRESETS + ("negative-rate",)


# ---------------------------------------------------------------------------
# configuration and output
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    """Effective settings of one invocation; hashed into every output header."""

    command: str
    inputs: list = field(default_factory=list)
    monotones: list = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)
    T: Optional[float] = None
    dt: Optional[float] = None
    seed: int = 0
    out: Optional[str] = None
    format: str = "json"
    extra: dict = field(default_factory=dict)

    def validate(self):
        if self.dt is not None and not self.dt > 0:
            raise SchemaError("--dt must be positive")
        if self.T is not None and not self.T >= 0:
            raise SchemaError("--T must be non-negative")
        for name in self.monotones:
            get_monotone(name)
        return self

    def digest(self):
        payload = asdict(self)
        payload.pop("out")
        payload["extra"].pop("assert", None)
        text = json.dumps(payload, sort_keys=True, default=str)
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def header_lines(self):
        tol = ", ".join(f"{k}={v:g}" for k, v in sorted(self.tolerances.items()))
        return [f"infogeom {__version__} {self.command}",
                f"config-hash {self.digest()}",
                f"seed {self.seed}",
                f"tolerances {tol}"]


def _threads():
    raw = os.environ.get("INFOGEOM_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError as exc:
        raise SchemaError(f"INFOGEOM_THREADS must be an integer, got {raw!r}") from exc


def _fmt(x):
    return "%.17g" % x


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj) and obj.ndim == 2:
            return matrix_to_json(obj)
        return _jsonable(obj.real.tolist() if np.iscomplexobj(obj) else obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if np.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def _write(cfg, text, stream=None):
    """Write to ``cfg.out`` atomically, or to ``stream``."""
    if cfg.out is None:
        (stream or sys.stdout).write(text)
        return
    directory = os.path.dirname(os.path.abspath(cfg.out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".infogeom-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, cfg.out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit_json(cfg, payload):
    doc = {"config": {"hash": cfg.digest(), "command": cfg.command, "seed": cfg.seed,
                      "tolerances": cfg.tolerances},
           **_jsonable(payload)}
    _write(cfg, json.dumps(doc, indent=2, sort_keys=False) + "\n")


def _emit_table(cfg, columns, rows):
    buf = io.StringIO()
    for line in cfg.header_lines():
        buf.write(f"# {line}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) if isinstance(v, (float, np.floating)) else str(v) for v in row) + "\n")
    _write(cfg, buf.getvalue())


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from exc


def _matrix(obj, key, hermitian=True, required=True):
    if key not in obj:
        if required:
            raise SchemaError(f"missing field {key!r}")
        return None
    A, _ = matrix_from_json(obj[key], hermitian=hermitian)
    return A


def _channel_from(obj):
    if "kraus" in obj:
        return dyn.QuantumChannel(kraus=[matrix_from_json(K)[0] for K in obj["kraus"]])
    if "superop" in obj:
        return dyn.QuantumChannel(superop=matrix_from_json(obj["superop"])[0])
    raise SchemaError("channel needs a 'kraus' list or a 'superop' matrix")


def _generator(args):
    if getattr(args, "preset", None):
        return dyn.preset(args.preset)
    if not args.input:
        raise SchemaError("give an input file or --preset")
    obj = _load_json(args.input)
    return dyn.Lindbladian.from_json(obj.get("generator", obj), strict=False)


def _check(cfg, ok, message):
    if cfg.extra.get("assert") and not ok:
        raise VerdictError(message)


def _pole_filter(L):
    if isinstance(L, dyn.DepolarizingFamily) and L.kind == "nonmarkov":
        return lambda t: abs(np.cos(2 * t)) < 1e-6
    return None


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_metric(args, cfg):
    """Fisher table and named divergences for a pair of states."""
    obj = _load_json(args.input)
    rho = _matrix(obj, "rho")
    sigma = _matrix(obj, "sigma")
    drho = _matrix(obj, "drho", required=False)
    if drho is None:
        drho = sigma - rho
    if rho.shape != sigma.shape or rho.shape != drho.shape:
        raise SchemaError("rho, sigma and drho must share one dimension")
    fisher_rows = []
    for name in cfg.monotones:
        f = get_monotone(name)
        fisher_rows.append({"f": name, "fisher": fisher_information(f, rho, drho),
                            "chi2": dv.chi2(f, rho, sigma).value})

    def val(r):
        return None if r.infinite else r.value

    divs = {
        "relative_entropy": val(dv.relative_entropy(rho, sigma)),
        "bures_contrast": val(dv.bures_contrast(rho, sigma)),
        "wy_contrast": val(dv.wy_contrast(rho, sigma)),
        "harmonic_contrast": val(dv.harmonic_contrast(rho, sigma)),
        "fidelity": dv.fidelity(rho, sigma),
        "trace_distance": dv.trace_distance(rho, sigma),
        "bures_distance": dv.bures_distance(rho, sigma),
        "wy_distance": dv.wy_distance(rho, sigma),
    }
    if cfg.format == "csv":
        rows = [(r["f"], r["fisher"], r["chi2"]) for r in fisher_rows]
        rows += [(k, "" if v is None else v, "") for k, v in divs.items()]
        _emit_table(cfg, ["name", "value", "chi2"], rows)
    else:
        _emit_json(cfg, {"fisher": fisher_rows, "divergences": divs})
    return 0


def _flux_job(f, pi0, drho0, L, times, fd_only, dt):
    mono = get_monotone(f)
    if not mono.has_measure and not fd_only:
        raise UnsupportedMeasureError(
            f"{mono.name} has no integral measure, so the per-jump currents are unavailable; "
            "rerun with --fd-only for the finite-difference derivative alone")
    return dyn.fisher_trajectory(mono, pi0, drho0, L, times, dt=dt)


def cmd_evolve(args, cfg):
    """Fisher information along an evolution with its flux decomposition."""
    L = _generator(args)
    d = L.d
    if args.states:
        obj = _load_json(args.states)
        pi0, drho0 = _matrix(obj, "pi"), _matrix(obj, "drho")
    else:
        pi0 = random_density(d, seed=cfg.seed)
        drho0 = random_tangent(d, seed=cfg.seed + 1)
    n = int(round(cfg.T / cfg.dt))
    times = np.arange(n + 1) * cfg.dt
    workers = min(_threads(), len(cfg.monotones))
    jobs = [(f, pi0, drho0, L, times, args.fd_only, min(cfg.dt, 1e-3)) for f in cfg.monotones]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda a: _flux_job(*a), jobs))
    else:
        reports = [_flux_job(*a) for a in jobs]
    worst = max((r.max_relative_error() for r in reports if r.derivative_analytic is not None),
                default=0.0)
    tol = cfg.tolerances["flux"]
    if cfg.format == "json":
        out = []
        for r in reports:
            out.append({"f": r.f, "t": r.times, "fisher": r.fisher, "derivative_fd": r.derivative_fd,
                        "derivative_analytic": r.derivative_analytic, "rates": r.rates,
                        "currents": r.currents, "notes": r.notes,
                        "sign_changes_fd": dyn.sign_changes(r.derivative_fd, 1e-10)})
        _emit_json(cfg, {"trajectories": out, "max_relative_error": worst})
    else:
        text = "".join(r.to_csv(cfg.header_lines() + [f"f {r.f}"] + [f"note {x}" for x in r.notes])
                       for r in reports)
        _write(cfg, text)
    _check(cfg, worst < tol, f"flux identity error {worst:.3e} exceeds {tol:g}")
    return 0


def cmd_markov(args, cfg):
    """Markovianity verdict for a generator, or the classical Box-7-type rate counterexample."""
    if getattr(args, "preset", None) == "negative-rate":
        out = dyn.negative_rate_counterexample()
        payload = {"preset": "negative-rate", **out,
                   "traceless_contractive": out["max_traceless_derivative"] <= 0,
                   "embedding_witness": out["embedded_derivative"] > 0}
        _emit_json(cfg, payload)
        _check(cfg, payload["traceless_contractive"] and payload["embedding_witness"],
               "classical counterexample did not reproduce")
        return 0
    L = _generator(args)
    T = 5.0 if cfg.T is None else cfg.T
    rep = dyn.markov_report(L, T, n_grid=args.grid, trials=args.trials, seed=cfg.seed,
                            exclude=_pole_filter(L), tol=cfg.tolerances["markov"])
    _emit_json(cfg, rep)
    _check(cfg, rep["verdict"] == "MARKOVIAN", f"verdict {rep['verdict']}")
    return 0


def cmd_recover(args, cfg):
    """Generalized Petz map diagnostics, or a retrodiction experiment along an evolution."""
    fprime = args.fprime
    f = cfg.monotones[0]
    tol = cfg.tolerances["recovery"]
    if args.preset or (args.input and "generator" in _load_json(args.input)):
        L = _generator(args)
        if args.input and not args.preset:
            obj = _load_json(args.input)
            pi, drho = _matrix(obj, "pi"), _matrix(obj, "drho")
        else:
            pi = random_density(L.d, seed=cfg.seed)
            drho = 1e-3 * random_tangent(L.d, seed=cfg.seed + 1)
        T = 1.0 if cfg.T is None else cfg.T
        times = np.arange(int(round(T / cfg.dt)) + 1) * cfg.dt
        rows = rc.retrodiction_trajectory(fprime, f, pi, drho, L, times)
        if cfg.format == "json":
            _emit_json(cfg, {"rows": rows})
        else:
            _write(cfg, rc.retrodiction_csv(rows, cfg.header_lines()))
        return 0
    if not args.input:
        raise SchemaError("give an input file or --preset")
    obj = _load_json(args.input)
    pi = _matrix(obj, "pi")
    Phi = _channel_from(obj.get("channel", obj))
    R = rc.petz_map(fprime, f, pi, Phi)
    prior = float(np.linalg.norm(R(Phi.apply(pi)) - pi))
    rng = np.random.default_rng(cfg.seed)
    A, B = random_tangent(pi.shape[0], seed=rng), random_tangent(pi.shape[0], seed=rng)
    duality = rc.duality_residual(fprime, f, pi, Phi, A, B)
    ordered = True
    try:
        spec = rc.recovery_spectrum(fprime, f, pi, Phi, require_order=True)
    except SchemaError:
        spec, ordered = rc.recovery_spectrum(fprime, f, pi, Phi, require_order=False), False
    payload = {"fprime": fprime, "f": f, "cp_flag": R.cp_flag,
               "trace_preservation_error": R.channel.trace_preservation_error(),
               "prior_residual": prior, "duality_residual": duality,
               "spectrum": spec["eigenvalues"], "ordered": ordered,
               "involution_residual": rc.involution_check(f, fprime, pi, Phi)}
    _emit_json(cfg, payload)
    ev = np.asarray(spec["eigenvalues"])
    in_range = (not ordered) or bool(ev.min() >= -tol and ev.max() <= 1 + tol)
    _check(cfg, prior < tol and duality < tol and in_range, "recovery checks failed")
    return 0


def cmd_dbalance(args, cfg):
    """Detailed-balance report under the Alicki and Fisher definitions."""
    if args.preset == "fisher-only":
        L, pi = db.fisher_only_counterexample(args.beta)
    elif args.preset:
        raise SchemaError(f"unknown preset {args.preset!r}; choose from {list(DB_PRESETS)}")
    else:
        if not args.input:
            raise SchemaError("give an input file or --preset")
        obj = _load_json(args.input)
        pi = _matrix(obj, "pi")
        if "rate_matrix" in obj:
            L = db.classical_embedding(np.asarray(obj["rate_matrix"], dtype=float))
        else:
            L = dyn.Lindbladian.from_json(obj.get("generator", obj), strict=False)
    samples = tuple(cfg.monotones) if args.f else db.DEFAULT_F_SAMPLES
    rep = db.db_report(L, pi, samples, tol=cfg.tolerances["db"])
    payload = rep.to_dict()
    payload["summary"] = rep.verdict_line()
    payload["steady_state_residual"] = db.steady_state_residual(L, pi)
    if cfg.format == "csv":
        rows = [("alicki", rep.alicki_residual, "PASS" if rep.alicki_ok else "FAIL"),
                ("fisher", rep.fisher_residual, "PASS" if rep.fisher_ok else "FAIL")]
        rows += [(f"fisher[{k}]", v, "PASS" if v < rep.tolerance else "FAIL")
                 for k, v in rep.fisher_ok_per_f.items()]
        rows.append(("modular_commutator_norm", rep.modular_commutator_norm, ""))
        _emit_table(cfg, ["check", "residual", "verdict"], rows)
    else:
        _emit_json(cfg, payload)
    print(rep.verdict_line(), file=sys.stderr)
    _check(cfg, rep.fisher_ok and rep.alicki_ok, rep.verdict_line())
    return 0


def cmd_geodesic(args, cfg):
    """Bures and Wigner-Yanase distances, with the sampled Wigner-Yanase geodesic."""
    obj = _load_json(args.input)
    rho, sigma = _matrix(obj, "rho"), _matrix(obj, "sigma")
    n = args.segments
    d_wy = dv.wy_distance(rho, sigma)
    length = dv.path_length("wy", lambda t: dv.wy_geodesic_path(rho, sigma, t), n) if d_wy > 0 else 0.0
    rel = abs(length - d_wy) / d_wy if d_wy > 0 else 0.0
    payload = {"fidelity": dv.fidelity(rho, sigma), "bures_distance": dv.bures_distance(rho, sigma),
               "bures_length": dv.bures_length(rho, sigma), "affinity": dv.affinity(rho, sigma),
               "wy_distance": d_wy, "wy_path_length": length, "relative_gap": rel,
               "segments": n}
    if cfg.format == "csv":
        ts = np.linspace(0.0, 1.0, args.samples)
        rows = []
        for t in ts:
            P = dv.wy_geodesic_path(rho, sigma, float(t))
            rows.append((float(t), dv.wy_distance(rho, P), dv.bures_distance(rho, P),
                         dv.trace_distance(rho, P)))
        _emit_table(cfg, ["t", "wy_distance_from_rho", "bures_distance_from_rho",
                          "trace_distance_from_rho"], rows)
    else:
        _emit_json(cfg, payload)
    ok = payload["bures_distance"] <= d_wy + 1e-12 and rel < cfg.tolerances["geodesic"]
    _check(cfg, ok, "geodesic checks failed")
    return 0


def cmd_estimate(args, cfg):
    """Cramer-Rao bounds for a unitary or thermal family, and the Chernoff exponent for a pair."""
    obj = _load_json(args.input)
    payload = {}
    if "rho" in obj and "H" in obj:
        rho, H = _matrix(obj, "rho"), _matrix(obj, "H")
        kind = obj.get("family", "unitary")
        theta0 = float(obj.get("theta", 0.0))
        if kind == "unitary":
            def family(th):
                w, U = np.linalg.eigh(H)
                V = (U * np.exp(-1j * th * w)) @ U.conj().T
                return V @ rho @ V.conj().T
        elif kind == "thermal":
            def family(beta):
                return gibbs_state(H, beta)
        else:
            raise SchemaError("family must be 'unitary' or 'thermal'")
        rows = []
        for name in cfg.monotones:
            bound = cramer_rao_bound(name, family, theta0)
            rows.append({"f": name, "fisher": 1.0 / bound, "cramer_rao_bound": bound})
        payload["family"] = kind
        payload["bounds"] = rows
    if "rho0" in obj and "rho1" in obj:
        r0, r1 = _matrix(obj, "rho0"), _matrix(obj, "rho1")
        s_star, xi = dv.chernoff_optimize(r0, r1)
        payload["chernoff"] = {"s_star": s_star, "exponent": xi}
    if not payload:
        raise SchemaError("input needs {'rho', 'H'} for Cramer-Rao or {'rho0', 'rho1'} for Chernoff")
    _emit_json(cfg, payload)
    return 0


def cmd_garden(args, cfg):
    """Property table of the monotone catalog."""
    fB, fH = bures(), harmonic()
    rows = []
    for name, f in catalog().items():
        vals = f(LOG_GRID)
        bounded = bool(np.all(vals <= fB(LOG_GRID) * (1 + 1e-12)) and
                       np.all(vals >= fH(LOG_GRID) * (1 - 1e-12)))
        norm = normalization(f.measure) if f.has_measure else float("nan")
        rows.append({"name": name, "f(1)": float(f(1.0)), "bounded": bounded,
                     "cp_plus": "unrecorded" if f.cp_plus is None else f.cp_plus,
                     "cp_minus": "unrecorded" if f.cp_minus is None else f.cp_minus,
                     "normalization": norm})
    worst = max(abs(r["normalization"] - 1) for r in rows if np.isfinite(r["normalization"]))
    if cfg.format == "csv":
        cols = ["name", "f(1)", "bounded", "cp_plus", "cp_minus", "normalization"]
        _emit_table(cfg, cols, [tuple(r[c] for c in cols) for r in rows])
    else:
        _emit_json(cfg, {"catalog": rows, "max_normalization_error": worst})
    _check(cfg, worst < cfg.tolerances["garden"] and all(r["bounded"] for r in rows),
           "catalog properties failed")
    return 0


COMMANDS = {
    "metric": cmd_metric,
    "evolve": cmd_evolve,
    "markov": cmd_markov,
    "recover": cmd_recover,
    "dbalance": cmd_dbalance,
    "geodesic": cmd_geodesic,
    "estimate": cmd_estimate,
    "garden": cmd_garden,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _tolerance(text):
    key, sep, value = text.partition("=")
    if not sep or key not in DEFAULT_TOLERANCES:
        raise argparse.ArgumentTypeError(
            f"expected NAME=VALUE with NAME in {sorted(DEFAULT_TOLERANCES)}")
    try:
        return key, float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad tolerance value {value!r}") from exc


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--f", action="append", metavar="NAME",
                        help="monotone name (repeatable), e.g. bures, kmb, wy, alpha:0.3")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output path (written atomically); stdout by default")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--assert", dest="assert_", action="store_true",
                        help="exit with code 5 when the command's checks fail")
    common.add_argument("--tolerance", action="append", type=_tolerance, default=[],
                        metavar="NAME=VALUE", help=f"override one of {sorted(DEFAULT_TOLERANCES)}")

    timed = argparse.ArgumentParser(add_help=False)
    timed.add_argument("--T", type=float, default=None, help="time horizon")
    timed.add_argument("--dt", type=float, default=0.01, help="time step of the output grid")

    p = argparse.ArgumentParser(prog="infogeom", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("metric", parents=[common], help="Fisher table and divergences of two states")
    s.add_argument("input", help="JSON with rho, sigma and optionally drho")

    s = sub.add_parser("evolve", parents=[common, timed], help="Fisher flux along an evolution")
    s.add_argument("input", nargs="?", help="generator JSON")
    s.add_argument("--preset", choices=GENERATOR_PRESETS + ("depolarizing-markov", "depolarizing-nonmarkov"))
    s.add_argument("--states", help="JSON with the initial pi and drho (random by --seed otherwise)")
    s.add_argument("--fd-only", action="store_true",
                   help="allow monotones without a measure (finite-difference derivative only)")

    s = sub.add_parser("markov", parents=[common, timed], help="Markovianity verdict")
    s.add_argument("input", nargs="?", help="generator JSON")
    s.add_argument("--preset", choices=MARKOV_PRESETS + ("depolarizing-markov", "depolarizing-nonmarkov"))
    s.add_argument("--grid", type=int, default=201, help="number of rate samples on [0, T]")
    s.add_argument("--trials", type=int, default=50, help="witness trials per negative-rate time")

    s = sub.add_parser("recover", parents=[common, timed], help="generalized Petz recovery")
    s.add_argument("input", nargs="?", help="JSON with pi and a channel, or pi, drho and a generator")
    s.add_argument("--fprime", default="sqrt", help="monotone of the prior side (default sqrt)")
    s.add_argument("--preset", choices=GENERATOR_PRESETS)

    s = sub.add_parser("dbalance", parents=[common], help="detailed-balance report")
    s.add_argument("input", nargs="?", help="JSON with pi and a generator or a classical rate_matrix")
    s.add_argument("--preset", choices=DB_PRESETS)
    s.add_argument("--beta", type=float, default=1.0, help="inverse temperature of the preset")

    s = sub.add_parser("geodesic", parents=[common], help="Bures and Wigner-Yanase geodesics")
    s.add_argument("input", help="JSON with rho and sigma")
    s.add_argument("--segments", type=int, default=1000)
    s.add_argument("--samples", type=int, default=11, help="path samples in CSV output")

    s = sub.add_parser("estimate", parents=[common], help="Cramer-Rao and Chernoff bounds")
    s.add_argument("input", help="JSON with rho and H (and family, theta) and/or rho0 and rho1")

    sub.add_parser("garden", parents=[common], help="catalog of standard monotones")
    return p


def _config(args):
    tolerances = dict(DEFAULT_TOLERANCES)
    tolerances.update(dict(args.tolerance))
    default_f = {"dbalance": [], "garden": []}.get(args.command, ["bures"])
    default_format = "csv" if args.command == "evolve" else "json"
    cfg = RunConfig(
        command=args.command,
        inputs=[x for x in (getattr(args, "input", None), getattr(args, "states", None)) if x],
        monotones=list(args.f) if args.f else default_f,
        tolerances=tolerances,
        T=getattr(args, "T", None),
        dt=getattr(args, "dt", None),
        seed=args.seed,
        out=args.out,
        format=args.format or default_format,
        extra={"assert": args.assert_, "preset": getattr(args, "preset", None)},
    )
    if args.command == "evolve" and cfg.T is None:
        cfg.T = 5.0
    return cfg.validate()


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except InfogeomError as exc:
        print(f"infogeom {args.command}: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except np.linalg.LinAlgError as exc:
        print(f"infogeom {args.command}: numerical error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
