"""Standard monotone functions, their transforms, measures and paired convex functions.

A standard monotone ``f`` is matrix monotone on ``(0, inf)`` with ``f(1) = 1`` and
``f(x) = x f(1/x)``.  Each one fixes a Fisher kernel ``b f(a/b)`` (its "mean
form") and, when known, a measure ``dN`` on ``[0, 1]`` with

    1/f(x) = int dN(s) [1/(x+s) + 1/(1+s x)],    int dN(s) 2/(1+s) = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .errors import SchemaError, UnsupportedMeasureError

#: shared log-spaced grid used for pointwise property checks
LOG_GRID = np.logspace(-4, 4, 401)

#: below this distance from 1 the mean form switches to a Taylor expansion
NEAR_ONE = 1e-8

QUAD_NODES = 64


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@dataclass(frozen=True)
class MeasureDescriptor:
    """Measure on ``[0, 1]``: Dirac atoms plus an optional density.

    ``singular_exponent`` is a ``p`` in ``[0, 1)`` with ``density(s) * s**p``
    bounded near zero.  Quadrature substitutes ``s = u**m`` with
    ``m = 4 / (1 - p)``, which maps both ``s**-p`` and bounded fractional powers
    to smooth integrands in ``u``.
    """

    dirac_points: tuple = ()
    density: Optional[Callable] = None
    singular_exponent: float = 0.0
    label: str = ""

    def nodes(self, n=QUAD_NODES):
        """Quadrature nodes and weights representing the measure."""
        s_list, w_list = [], []
        for s, w in self.dirac_points:
            s_list.append(float(s))
            w_list.append(float(w))
        if self.density is not None:
            u, wu = _legendre(n)
            m = 4.0 / (1.0 - self.singular_exponent)
            s = u ** m
            jac = m * u ** (m - 1.0)
            s_list.extend(s.tolist())
            w_list.extend((wu * jac * self.density(s)).tolist())
        return np.array(s_list), np.array(w_list)


def measure_quadrature(measure, integrand, n=QUAD_NODES):
    """Integrate ``integrand(s)`` against a measure on ``[0, 1]``.

    Parameters
    ----------
    measure : MeasureDescriptor or None
        ``None`` stands for a monotone whose measure is not known.
    integrand : callable
        Scalar function of ``s``; called once per node.

    Raises
    ------
    UnsupportedMeasureError
        If the measure is absent.
    """
    if measure is None:
        raise UnsupportedMeasureError("this monotone has no known integral measure")
    s, w = measure.nodes(n)
    vals = np.array([integrand(si) for si in s], dtype=float)
    return float(np.dot(w, vals))


def normalization(measure):
    """``int dN(s) 2/(1+s)``, which equals one for every valid measure."""
    return measure_quadrature(measure, lambda s: 2.0 / (1.0 + s))


def dirac_measure(s, weight, label=""):
    return MeasureDescriptor(dirac_points=((s, weight),), label=label)


BURES_MEASURE = dirac_measure(1.0, 1.0, "delta(s-1)")
HARMONIC_MEASURE = dirac_measure(0.0, 0.5, "delta(s)/2")
KMB_MEASURE = MeasureDescriptor(density=lambda s: 1.0 / (1.0 + s), label="1/(1+s)")
SQRT_MEASURE = MeasureDescriptor(density=lambda s: 1.0 / (np.pi * np.sqrt(s)),
                                 singular_exponent=0.5, label="1/(pi sqrt(s))")


def alpha_measure(a):
    c = math.sin(math.pi * a) / (math.pi * a * (1 - a))
    p = max(0.0, -a, a - 1.0)
    return MeasureDescriptor(
        density=lambda s: c * (s ** a + s ** (1 - a)) / (1 + s) ** 2,
        singular_exponent=p, label=f"c_a (s^a + s^(1-a))/(1+s)^2, a={a}")


def heinz_lt_measure(g):
    c = math.sin(math.pi * g) / math.pi
    p = max(g, 1.0 - g)
    return MeasureDescriptor(
        density=lambda s: 0.5 * c * (s ** (g - 1) + s ** (-g)),
        singular_exponent=p, label=f"C_g (s^(g-1) + s^-g)/2, g={g}")


# ---------------------------------------------------------------------------
# standard monotones
# ---------------------------------------------------------------------------

def _second_derivative_at_one(func, h=1e-3):
    return float((func(np.array(1 + h)) - 2.0 + func(np.array(1 - h))) / h ** 2)


@dataclass(frozen=True)
class StandardMonotone:
    """An evaluable standard monotone function.

    Attributes
    ----------
    name : str
        Registry name.
    func : callable
        Vectorized evaluation on ``x > 0``; need not be defined at ``x = 1``.
    measure : MeasureDescriptor or None
        Integral measure ``dN``, or ``None`` when unknown.
    cp_plus, cp_minus : bool or None
        Whether ``J_f`` (resp. its inverse) is completely positive for every
        state; ``None`` means not recorded.
    """

    name: str
    func: Callable = field(repr=False)
    measure: Optional[MeasureDescriptor] = field(default=None, repr=False)
    cp_plus: Optional[bool] = None
    cp_minus: Optional[bool] = None
    params: tuple = ()
    mean_func: Optional[Callable] = field(default=None, repr=False)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0):
            raise SchemaError("standard monotones are defined on x > 0")
        u = x - 1.0
        near = np.abs(u) < NEAR_ONE
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.asarray(self.func(np.where(near, 2.0, x)), dtype=float)
        if np.any(near):
            out = np.where(near, 1.0 + 0.5 * u + 0.5 * self.second_derivative * u * u, out)
        return out[()] if out.ndim == 0 else out

    @property
    def second_derivative(self):
        """Numerical estimate of ``f''(1)`` used by the near-one Taylor form."""
        cache = self.__dict__.get("_f2")
        if cache is None:
            with np.errstate(divide="ignore", invalid="ignore"):
                cache = _second_derivative_at_one(self.func)
            object.__setattr__(self, "_f2", cache)
        return cache

    def mean(self, a, b):
        """Kernel value ``b f(a/b)``, stable for ``a`` close to ``b``."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if np.any(a <= 0) or np.any(b <= 0):
            raise SchemaError("mean requires positive arguments")
        if self.mean_func is not None:
            return self.mean_func(a, b)
        return b * self(a / b)

    @property
    def has_measure(self):
        return self.measure is not None


def _logmean(a, b):
    a, b = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
    u = a / b - 1.0
    near = np.abs(u) < NEAR_ONE
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = b * u / np.log1p(np.where(near, 1.0, u))
    series = b * (1.0 + u / 2.0 - u * u / 12.0)
    out = np.where(near, series, direct)
    return out[()] if out.ndim == 0 else out


def bures():
    return StandardMonotone("bures", lambda x: (x + 1) / 2, BURES_MEASURE,
                            cp_plus=False, cp_minus=True,
                            mean_func=lambda a, b: (a + b) / 2)


def harmonic():
    return StandardMonotone("harmonic", lambda x: 2 * x / (x + 1), HARMONIC_MEASURE,
                            cp_plus=True, cp_minus=False,
                            mean_func=lambda a, b: 2 * a * b / (a + b))


def sqrt_monotone():
    return StandardMonotone("sqrt", np.sqrt, SQRT_MEASURE, cp_plus=True, cp_minus=True,
                            mean_func=lambda a, b: np.sqrt(a * b))


def kmb():
    """Kubo-Mori-Bogoliubov monotone (logarithmic mean)."""
    return StandardMonotone("kmb", lambda x: (x - 1) / np.log1p(x - 1), KMB_MEASURE,
                            cp_plus=False, cp_minus=True, mean_func=_logmean)


def wigner_yanase():
    return StandardMonotone("wy", lambda x: ((1 + np.sqrt(x)) / 2) ** 2,
                            alpha_measure(0.5), cp_plus=False, cp_minus=True,
                            mean_func=lambda a, b: ((np.sqrt(a) + np.sqrt(b)) / 2) ** 2)


def _alpha_func(a):
    def f(x):
        lx = np.log(x)
        return a * (1 - a) * (x - 1) ** 2 / (np.expm1(a * lx) * np.expm1((1 - a) * lx))
    return f


def alpha_family(a):
    """Monotone of the alpha-divergences, ``a`` in ``[-1, 2]``.

    The endpoints ``a in {0, 1}`` give the KMB monotone and ``a in {-1, 2}`` the
    harmonic mean.
    """
    a = float(a)
    if not -1.0 <= a <= 2.0:
        raise SchemaError(f"alpha must lie in [-1, 2], got {a}")
    if a in (0.0, 1.0):
        m = kmb()
        return StandardMonotone(f"alpha:{a:g}", m.func, m.measure, m.cp_plus, m.cp_minus,
                                (a,), m.mean_func)
    if a in (-1.0, 2.0):
        m = harmonic()
        return StandardMonotone(f"alpha:{a:g}", m.func, m.measure, m.cp_plus, m.cp_minus,
                                (a,), m.mean_func)
    if 0.0 <= a <= 1.0:
        plus, minus = False, True
    elif a <= -0.5 or a >= 1.5:
        plus, minus = True, False
    else:
        plus, minus = False, False
    return StandardMonotone(f"alpha:{a:g}", _alpha_func(a), alpha_measure(a),
                            cp_plus=plus, cp_minus=minus, params=(a,))


def variance():
    """Monotone of the quantum information variance; no measure is known."""
    def f(x):
        lx = np.log(x)
        return 2 * (x - 1) ** 2 / ((x + 1) * lx * lx)
    return StandardMonotone("variance", f, None, cp_plus=False, cp_minus=False)


def heinz_gt(g):
    """``(x^g + x^(1-g)) / 2`` for ``g`` in ``[0, 1]``."""
    g = float(g)
    if not 0.0 <= g <= 1.0:
        raise SchemaError(f"gamma must lie in [0, 1], got {g}")
    if g in (0.0, 1.0):
        measure = BURES_MEASURE
    elif g == 0.5:
        measure = SQRT_MEASURE
    else:
        measure = None
    return StandardMonotone(f"heinz-gt:{g:g}", lambda x: (x ** g + x ** (1 - g)) / 2, measure,
                            cp_plus=(g == 0.5), cp_minus=True, params=(g,),
                            mean_func=lambda a, b: (a ** g * b ** (1 - g) + a ** (1 - g) * b ** g) / 2)


def heinz_lt(g):
    """``2x / (x^g + x^(1-g))``, the T-transform of :func:`heinz_gt`."""
    g = float(g)
    if not 0.0 <= g <= 1.0:
        raise SchemaError(f"gamma must lie in [0, 1], got {g}")
    if g in (0.0, 1.0):
        measure = HARMONIC_MEASURE
    else:
        measure = heinz_lt_measure(g)
    return StandardMonotone(f"heinz-lt:{g:g}", lambda x: 2 * x / (x ** g + x ** (1 - g)), measure,
                            cp_plus=True, cp_minus=(g == 0.5), params=(g,),
                            mean_func=lambda a, b: 2 * a * b / (a ** g * b ** (1 - g) + a ** (1 - g) * b ** g))


def extreme_point(lam):
    """Extreme point ``f_lam(x) = ((1+lam)/2) (x/(x+lam) + x/(1+lam x))``."""
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise SchemaError(f"lambda must lie in [0, 1], got {lam}")
    measure = {0.0: BURES_MEASURE, 1.0: HARMONIC_MEASURE}.get(lam)

    def mean(a, b):
        return (1 + lam) / 2 * (a * b / (a + lam * b) + a * b / (b + lam * a))

    return StandardMonotone(f"lambda:{lam:g}",
                            lambda x: (1 + lam) / 2 * (x / (x + lam) + x / (1 + lam * x)),
                            measure, cp_plus=(lam == 1.0), cp_minus=(True if lam == 0.0 else None),
                            params=(lam,), mean_func=mean)


def convex_combination(weights, monotones):
    """Pointwise convex combination of standard monotones (again standard)."""
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1) > 1e-12:
        raise SchemaError("weights must be a probability vector")
    ms = list(monotones)
    name = "+".join(f"{w:g}*{m.name}" for w, m in zip(weights, ms))
    return StandardMonotone(
        name, lambda x: sum(w * m(x) for w, m in zip(weights, ms)), None,
        mean_func=lambda a, b: sum(w * m.mean(a, b) for w, m in zip(weights, ms)))


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------

_T_PAIRS = {"bures": harmonic, "harmonic": bures, "sqrt": sqrt_monotone}


def t_transform(f):
    """``[Tf](x) = x / f(x)``; involutive and order reversing."""
    if f.name in _T_PAIRS:
        return _T_PAIRS[f.name]()
    if f.__dict__.get("_source") is not None:
        return f._source
    if f.name.startswith("heinz-gt:"):
        return heinz_lt(f.params[0])
    if f.name.startswith("heinz-lt:"):
        return heinz_gt(f.params[0])
    out = StandardMonotone(f"T({f.name})", lambda x: x / f(x), None,
                           cp_plus=f.cp_minus, cp_minus=f.cp_plus,
                           mean_func=lambda a, b: a * b / f.mean(a, b))
    object.__setattr__(out, "_source", f)
    return out


@dataclass(frozen=True)
class StandardConvex:
    """A convex function ``g`` with ``g(1) = 0``, defining a contrast function.

    ``monotone`` is the paired standard monotone when known.
    """

    name: str
    func: Callable = field(repr=False)
    monotone: Optional[StandardMonotone] = field(default=None, repr=False)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        u = x - 1.0
        near = np.abs(u) < NEAR_ONE
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.asarray(self.func(np.where(near, 2.0, x)), dtype=float)
        if np.any(near):
            # a symmetric g with g''(1) = 1 behaves like (x-1)^2/2 near one
            out = np.where(near, self._near(u), out)
        return out[()] if out.ndim == 0 else out

    def _near(self, u):
        h = 1e-3
        with np.errstate(divide="ignore", invalid="ignore"):
            g1 = (self.func(np.array(1 + h)) - self.func(np.array(1 - h))) / (2 * h)
            g2 = (self.func(np.array(1 + h)) + self.func(np.array(1 - h))) / h ** 2
        return g1 * u + 0.5 * g2 * u * u

    def symmetrized(self):
        """``(g(x) + x g(1/x)) / 2``, which defines the same contrast symmetrized."""
        return StandardConvex(f"symm({self.name})",
                              lambda x: 0.5 * (self.func(x) + x * self.func(1 / x)),
                              self.monotone)


def l_transform(f):
    """Map a standard monotone to its symmetric convex function ``(x-1)^2 / (2 f(x))``."""
    return StandardConvex(f"L({f.name})", lambda x: (x - 1) ** 2 / (2 * f(x)), f)


def l_inverse(g):
    """Inverse of :func:`l_transform`: ``f(x) = (x-1)^2 / (2 g(x))``."""
    if g.monotone is not None and g.name == f"L({g.monotone.name})":
        return g.monotone
    return StandardMonotone(f"L({g.name})", lambda x: (x - 1) ** 2 / (2 * g(x)), None)


def monotone_from_convex(g, name=None):
    """Standard monotone paired with an arbitrary convex ``g``: ``(x-1)^2 / (g(x) + x g(1/x))``."""
    gf = g.func if isinstance(g, StandardConvex) else g
    return StandardMonotone(name or f"f[{getattr(g, 'name', 'g')}]",
                            lambda x: (x - 1) ** 2 / (gf(x) + x * gf(1 / x)), None)


def convex_catalog():
    """Named (generally non-symmetric) convex functions of the classical divergences."""
    return {
        "relative_entropy": StandardConvex("relative_entropy", lambda x: -np.log(x), kmb()),
        "wy": StandardConvex("wy", lambda x: 4 * (1 - np.sqrt(x)), wigner_yanase()),
        "bures": StandardConvex("bures", lambda x: (x - 1) ** 2 / (x + 1), bures()),
        "harmonic": StandardConvex("harmonic", lambda x: (x - 1) ** 2 / 2, harmonic()),
        "sqrt": StandardConvex("sqrt", lambda x: x ** -0.5 - x ** 0.5, sqrt_monotone()),
        "variance": StandardConvex("variance", lambda x: 0.5 * np.log(x) ** 2, variance()),
    }


def alpha_convex(a):
    """``g_a(x) = (x^a - 1) / (a (a - 1))``; ``a -> 0`` gives ``-log x``."""
    a = float(a)
    if a == 0.0:
        return StandardConvex("alpha:0", lambda x: -np.log(x), alpha_family(0.0))
    if a == 1.0:
        return StandardConvex("alpha:1", lambda x: x * np.log(x), alpha_family(1.0))
    return StandardConvex(f"alpha:{a:g}", lambda x: (x ** a - 1) / (a * (a - 1)), alpha_family(a))


# ---------------------------------------------------------------------------
# registry and property checks
# ---------------------------------------------------------------------------

_SIMPLE = {
    "bures": bures, "b": bures,
    "harmonic": harmonic, "h": harmonic,
    "sqrt": sqrt_monotone, "sq": sqrt_monotone, "geometric": sqrt_monotone,
    "kmb": kmb, "l": kmb, "log": kmb,
    "wy": wigner_yanase, "wigner-yanase": wigner_yanase,
    "variance": variance, "v": variance,
}
_PARAM = {
    "alpha": alpha_family,
    "heinz-gt": heinz_gt,
    "heinz-lt": heinz_lt,
    "lambda": extreme_point,
}


def get_monotone(spec):
    """Resolve a registry string such as ``"kmb"``, ``"alpha:0.3"`` or ``"lambda:0.7"``."""
    if isinstance(spec, StandardMonotone):
        return spec
    key = str(spec).strip().lower()
    if key in _SIMPLE:
        return _SIMPLE[key]()
    if ":" in key:
        head, _, arg = key.partition(":")
        if head in _PARAM:
            try:
                value = float(arg)
            except ValueError as exc:
                raise SchemaError(f"bad parameter in monotone name {spec!r}") from exc
            return _PARAM[head](value)
    raise SchemaError(f"unknown monotone {spec!r}")


def catalog():
    """The named monotones used throughout the package, largest first where ordered."""
    return {
        "bures": bures(),
        "heinz-gt:0.25": heinz_gt(0.25),
        "wy": wigner_yanase(),
        "alpha:0.3": alpha_family(0.3),
        "kmb": kmb(),
        "variance": variance(),
        "sqrt": sqrt_monotone(),
        "heinz-lt:0.25": heinz_lt(0.25),
        "alpha:-0.5": alpha_family(-0.5),
        "lambda:0.4": extreme_point(0.4),
        "harmonic": harmonic(),
    }


def check_standard(f, grid=LOG_GRID):
    """Residuals of the four defining properties on the grid.

    Returns a dict with ``unit`` (``|f(1) - 1|``), ``symmetry``
    (``max |f(x) - x f(1/x)|``), ``bounds`` (worst violation of
    ``2x/(x+1) <= f <= (x+1)/2``) and ``monotone`` (worst decrease between
    consecutive grid points).  All are zero or slightly positive for a
    standard monotone.
    """
    y = f(grid)
    lo, hi = 2 * grid / (grid + 1), (grid + 1) / 2
    return {
        "unit": float(abs(f(1.0) - 1.0)),
        "symmetry": float(np.max(np.abs(y - grid * f(1 / grid)))),
        "bounds": float(max(np.max(lo - y), np.max(y - hi), 0.0)),
        "monotone": float(max(-np.min(np.diff(y)), 0.0)),
    }


def is_below(fprime, f, grid=LOG_GRID, tol=1e-12):
    """Pointwise ``fprime <= f`` on the grid."""
    return bool(np.all(fprime(grid) <= f(grid) * (1 + tol) + tol))
