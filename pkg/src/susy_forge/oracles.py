"""Closed-form transformed potentials and solutions, used as ground truth.

Each entry carries its evaluator, the antiderivative F of u^2 that fixes the
meaning of its gamma (gamma_engine = gamma + F(a) for an engine grid starting
at a), a default domain and a comparison tolerance.  Entries are evaluated as
written; whether a catalogued pair actually solves its own equation is
checked separately by ``pair_consistency``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq

from .grid import Grid, GridFn, deriv1, deriv2, make_grid
from .specfun import erf, expint, hermite

SQRT_PI = np.sqrt(np.pi)
_GL_X, _GL_W = leggauss(80)

# tolerance classes
ELEMENTARY = ("abs", 1e-8)
ERF = ("abs", 1e-6)
EXPINT = ("rel", 1e-6)
PAIR_TOL = 1e-6


class OracleError(ValueError):
    pass


class IrregularParameters(OracleError):
    """The requested parameters put a pole of the closed form inside the domain."""


def _gl(fun, x):
    """int_0^x fun(t) dt for each x, 80-point Gauss-Legendre."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    t = 0.5 * x[:, None] * (1.0 + _GL_X[None, :])
    return 0.5 * x * (fun(t) @ _GL_W)


# ---------------------------------------------------------------- constant V1

def _s_below(p):
    d = p["c"] ** 2 - p["eps"]
    if d <= 0:
        raise OracleError("this entry needs eps < c^2")
    return np.sqrt(d)


def _s_above(p):
    d = p["eps"] - p["c"] ** 2
    if d <= 0:
        raise OracleError("this entry needs eps > c^2")
    return np.sqrt(d)


def _solcon(p, x):
    s = _s_below(p)
    return p["k1"] * np.exp(s * x) + p["k2"] * np.exp(-s * x)


def _rosu_den(p, x):
    c = p["c"]
    return 2.0 * c * p["gamma"] * np.exp(2.0 * c * x) - 1.0


def _v3rosu(p, x):
    c = p["c"]
    d = _rosu_den(p, x)
    return c ** 2 + 8.0 * c ** 2 / d + 8.0 * c ** 2 / d ** 2


def _solrosucon(p, x):
    c = p["c"]
    return 2.0 * c * np.exp(c * x) / _rosu_den(p, x)


def _F_rosu(p, x):
    c = p["c"]
    return -np.exp(-2.0 * c * x) / (2.0 * c)


def _conbound_den(p, x):
    s = _s_below(p)
    return 2.0 * p["gamma"] * s + np.exp(2.0 * s * x)


def _conbound_v3(p, x):
    s = _s_below(p)
    b = 2.0 * p["gamma"] * s * np.exp(-2.0 * s * x) + 1.0
    return p["c"] ** 2 - 8.0 * s ** 2 / b + 8.0 * s ** 2 / b ** 2


def _conbound_psi(p, x):
    s = _s_below(p)
    return 2.0 * s * np.exp(s * x) / _conbound_den(p, x)


def _F_conbound(p, x):
    s = _s_below(p)
    return np.exp(2.0 * s * x) / (2.0 * s)


def _gen_den(p, x):
    s = _s_below(p)
    k1, k2 = p["k1"], p["k2"]
    return (2.0 * p["gamma"] * s + k1 ** 2 * np.exp(2 * s * x) - k2 ** 2 * np.exp(-2 * s * x)
            + 4.0 * k1 * k2 * s * x)


def _v3gen(p, x):
    s = _s_below(p)
    k1, k2 = p["k1"], p["k2"]
    e2, em2 = np.exp(2 * s * x), np.exp(-2 * s * x)
    d = _gen_den(p, x)
    return (p["c"] ** 2 - 4.0 * s ** 2 * (k1 ** 2 * e2 - k2 ** 2 * em2) / d
            + 4.0 * s ** 2 * (k1 ** 2 * e2 + k2 ** 2 * em2 + 2 * k1 * k2) ** 2 / d ** 2)


def _J_psi(p, x):
    # bracket multiplying C2, as catalogued
    s = _s_below(p)
    k1, k2, g = p["k1"], p["k2"], p["gamma"]
    tail = 4.0 * s ** 2 * (2 * k1 * k2 * x + g) ** 2 / (k1 * k2 + k2 ** 2 * np.exp(-s * x))
    return (1.0 / (2.0 * s)) ** 3 * (
        k1 ** 2 * np.exp(2 * s * x) - k2 ** 2 * np.exp(-2 * s * x) - 8 * k1 * k2 * s ** 2 * x ** 2
        - 4.0 * s * (k1 * k2 + 2.0 * g * s) * x + tail)


def _psi_gen(p, x):
    s = _s_below(p)
    u = p["k1"] * np.exp(s * x) + p["k2"] * np.exp(-s * x)
    bracket = p["C1"] + (p["C2"] * _J_psi(p, x) if p["C2"] != 0 else 0.0)
    return 2.0 * s * u / _gen_den(p, x) * bracket


def _F_gen(p, x):
    s = _s_below(p)
    k1, k2 = p["k1"], p["k2"]
    return (k1 ** 2 * np.exp(2 * s * x) - k2 ** 2 * np.exp(-2 * s * x) + 4 * k1 * k2 * s * x) / (2.0 * s)


def _hyp_den(p, x):
    s = _s_below(p)
    return s * (p["gamma"] + 2.0 * x) + np.sinh(2.0 * s * x)


def _hyp_v3(p, x):
    s = _s_below(p)
    d = _hyp_den(p, x)
    ch, sh = np.cosh(s * x), np.sinh(s * x)
    return p["c"] ** 2 - 16.0 * s ** 2 * ch * sh / d + 16.0 * s ** 2 * ch ** 4 / d ** 2


def _hyp_psi(p, x):
    s = _s_below(p)
    return 2.0 * s * np.cosh(s * x) / _hyp_den(p, x)


def _F_hyp(p, x):
    s = _s_below(p)
    return 2.0 * x + np.sinh(2.0 * s * x) / s


def _trig_den(p, x):
    s = _s_above(p)
    return 2.0 * s * (2.0 * p["gamma"] + x) - np.sin(2.0 * s * x)


def _trig_v3(p, x):
    # sqrt(c^2 - eps) read as the real s = sqrt(eps - c^2), its square as s^2
    s = _s_above(p)
    d = _trig_den(p, x)
    return (p["c"] ** 2 - 8.0 * s ** 2 * np.sin(2 * s * x) / d
            + 32.0 * s ** 2 * np.sin(s * x) ** 4 / d ** 2)


def _trig_psi(p, x):
    s = _s_above(p)
    return 4.0 * s * np.sin(s * x) / _trig_den(p, x)


def _F_trig(p, x):
    s = _s_above(p)
    return 0.5 * x - np.sin(2.0 * s * x) / (4.0 * s)


# ----------------------------------------------------------------- Dirac q0

def _require_positive(x):
    if np.any(np.asarray(x) <= 0):
        raise OracleError("this entry is defined for x > 0 only")


def _xE(x):
    _require_positive(x)
    return x * expint(2.0 / 3.0, 2.0 * x ** 3 / 3.0)


def _dirac_den(p, x):
    return 3.0 + 10.0 * _xE(x)


def _phi1(p, x):
    # Phi1 = e^{-x^3/3} [k1 - 2 m k2 int_0^x e^{2t^3/3} dt]
    x = np.asarray(x, dtype=float)
    inner = _gl(lambda t: np.exp(2.0 * t ** 3 / 3.0), x.ravel()).reshape(x.shape)
    return np.exp(-x ** 3 / 3.0) * (p["k1"] - 2.0 * p["m"] * p["k2"] * inner)


def _hatpsiex(p, x):
    return 3.0 * np.exp(-x ** 3 / 3.0) / _dirac_den(p, x)


def _v3ex(p, x):
    d = _dirac_den(p, x)
    return (x ** 4 - 2.0 * x - 120.0 * x ** 2 * np.exp(-2.0 * x ** 3 / 3.0) / d
            + 1800.0 * np.exp(-4.0 * x ** 3 / 3.0) / d ** 2)


def _q1(p, x):
    return -x ** 2 + 30.0 * np.exp(-2.0 * x ** 3 / 3.0) / _dirac_den(p, x)


def _F_dirac(p, x):
    return -_xE(x) / 3.0


# ------------------------------------------------------------ Fokker-Planck

def _k_of(p) -> int:
    k = p["k"]
    if int(k) != k or k < 0:
        raise OracleError(f"k must be a nonnegative integer, got {k}")
    return int(k)


def _F_fok(p, x):
    """int_0^x exp(-t^2) H_k(t)^2 dt."""
    k = _k_of(p)
    x = np.asarray(x, dtype=float)
    if k == 0:
        return 0.5 * SQRT_PI * erf(x)
    if k == 1:
        return SQRT_PI * erf(x) - 2.0 * x * np.exp(-x ** 2)
    out = _gl(lambda t: np.exp(-t ** 2) * hermite(k, t) ** 2, x.ravel())
    return out.reshape(x.shape)


def _fok_D(p, x):
    return p["gamma"] + _F_fok(p, x)


def _v3fok(p, x):
    k = _k_of(p)
    hk = hermite(k, x)
    hk1 = hermite(k - 1, x) if k > 0 else np.zeros_like(np.asarray(x, dtype=float))
    e = np.exp(-x ** 2)
    D = _fok_D(p, x)
    return (x ** 2 - 1.0 + 2.0 * np.exp(-2.0 * x ** 2) * hk ** 4 / D ** 2
            + (4.0 * e * x * hk ** 2 - 8.0 * k * e * hk1 * hk) / D)


def _J_fok(p, x):
    """int_0^x exp(-t^2) / H_k(t)^2 [gamma + F(t)]^2 dt (H_k without nodes on [0, x])."""
    k = _k_of(p)
    x = np.asarray(x, dtype=float)

    def integrand(t):
        hk = hermite(k, t)
        if np.any(hk == 0) or (k > 0 and np.any(np.sign(hk) != np.sign(hk.ravel()[0]))):
            raise IrregularParameters("H_k vanishes inside the C2 integral")
        D = p["gamma"] + _F_fok(p, t.ravel()).reshape(t.shape)
        return np.exp(-t ** 2) / hk ** 2 * D ** 2

    out = np.array([_gl(integrand, np.array([xi]))[0] if xi != 0 else 0.0 for xi in x.ravel()])
    return out.reshape(x.shape)


def _solzerofok(p, x):
    k = _k_of(p)
    u = np.exp(-0.5 * x ** 2) * hermite(k, x)
    bracket = p["C1"]
    if p.get("C2", 0.0) != 0:
        bracket = bracket + p["C2"] * _J_fok(p, x)
    return u / _fok_D(p, x) * bracket


def _v0(p, x):
    return -np.log(5.0 * np.exp(-0.5 * x ** 2) / (18.0 - 10.0 * SQRT_PI * erf(x)))


def _v1(p, x):
    _require_positive(x)
    return -np.log(20.0 * x * np.exp(0.5 * x ** 2)
                   / (-20.0 * x + np.exp(x ** 2) * (1.0 + 10.0 * SQRT_PI * erf(x))))


# ----------------------------------------------------------------- catalog

@dataclass(frozen=True)
class OracleEntry:
    name: str
    formula: Callable
    params_schema: Tuple[str, ...]
    F: Optional[Callable] = None
    domain: Tuple[float, float] = (-np.inf, np.inf)
    tol: Tuple[str, float] = ELEMENTARY
    denominator: Optional[Callable] = None
    J: Optional[Callable] = None  # antiderivative behind C2, when catalogued
    defaults: Dict[str, float] = field(default_factory=dict)

    def params(self, given: Optional[Dict[str, float]] = None) -> Dict[str, float]:
        p = dict(self.defaults)
        p.update(given or {})
        missing = [k for k in self.params_schema if k not in p]
        if missing:
            raise OracleError(f"{self.name}: missing parameters {missing}")
        return {k: float(v) for k, v in p.items()}


_CONST = ("c",)
CATALOG: Dict[str, OracleEntry] = {e.name: e for e in [
    OracleEntry("solcon", _solcon, ("c", "eps", "k1", "k2")),
    OracleEntry("v3rosu", _v3rosu, ("c", "gamma"), _F_rosu, denominator=_rosu_den),
    OracleEntry("solrosucon", _solrosucon, ("c", "gamma"), _F_rosu, denominator=_rosu_den),
    OracleEntry("V3gen", _v3gen, ("c", "eps", "gamma", "k1", "k2"), _F_gen, denominator=_gen_den),
    OracleEntry("PSI", _psi_gen, ("c", "eps", "gamma", "k1", "k2", "C1", "C2"), _F_gen,
                denominator=_gen_den, J=_J_psi),
    OracleEntry("conbound-V3", _conbound_v3, ("c", "eps", "gamma"), _F_conbound, denominator=_conbound_den),
    OracleEntry("conbound-psi", _conbound_psi, ("c", "eps", "gamma"), _F_conbound, denominator=_conbound_den),
    OracleEntry("hyperbolic-V3", _hyp_v3, ("c", "eps", "gamma"), _F_hyp, denominator=_hyp_den),
    OracleEntry("hyperbolic-psi", _hyp_psi, ("c", "eps", "gamma"), _F_hyp, denominator=_hyp_den),
    OracleEntry("trig-V3", _trig_v3, ("c", "eps", "gamma"), _F_trig, denominator=_trig_den),
    OracleEntry("trig-psi", _trig_psi, ("c", "eps", "gamma"), _F_trig, denominator=_trig_den),
    OracleEntry("phi1", _phi1, ("k1", "k2", "m"), domain=(0.0, 3.0), tol=("abs", 1e-8)),
    OracleEntry("hatpsiex", _hatpsiex, (), _F_dirac, (0.0, np.inf), EXPINT, _dirac_den,
                defaults={"gamma": -0.1, "C1": -0.1}),
    OracleEntry("v3ex", _v3ex, (), _F_dirac, (0.0, np.inf), EXPINT, _dirac_den,
                defaults={"gamma": -0.1, "C1": -0.1}),
    OracleEntry("q1", _q1, (), _F_dirac, (0.0, np.inf), EXPINT, _dirac_den,
                defaults={"gamma": -0.1, "C1": -0.1}),
    OracleEntry("v3fok", _v3fok, ("k", "gamma"), _F_fok, tol=ERF, denominator=_fok_D),
    OracleEntry("solzerofok", _solzerofok, ("k", "gamma", "C1"), _F_fok, tol=ERF, denominator=_fok_D,
                J=_J_fok, defaults={"C2": 0.0}),
    OracleEntry("v0", _v0, (), _F_fok, tol=ERF, defaults={"k": 0, "gamma": -0.9, "C1": -0.25, "C2": 0.0},
                denominator=lambda p, x: 18.0 - 10.0 * SQRT_PI * erf(x)),
    OracleEntry("v1", _v1, (), _F_fok, (0.0, np.inf), ERF, defaults={"k": 1, "gamma": 0.1, "C1": 1.0, "C2": 0.0},
                denominator=lambda p, x: _fok_D(p, x)),
]}


def entry(name: str) -> OracleEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise OracleError(f"unknown oracle entry {name!r}; known: {sorted(CATALOG)}") from None


def _check_domain(e: OracleEntry, x):
    lo, hi = e.domain
    xa = np.asarray(x, dtype=float)
    if np.any(xa < lo) or np.any(xa > hi):
        raise OracleError(f"{e.name}: x outside domain {e.domain}")


def check_regular(name: str, params: Dict[str, float], x: np.ndarray) -> None:
    """Raise IrregularParameters if the entry's denominator vanishes on ``x``."""
    e = entry(name)
    if e.denominator is None:
        return
    d = np.asarray(e.denominator(e.params(params), np.asarray(x, dtype=float)), dtype=float)
    if np.any(d == 0) or np.any(~np.isfinite(d)) or np.any(np.sign(d[:-1]) != np.sign(d[1:])):
        raise IrregularParameters(f"{name}: denominator vanishes in [{np.min(x)}, {np.max(x)}] for {params}")


def oracle_eval(name: str, params: Dict[str, float], x):
    """Closed-form value(s) of entry ``name`` at ``x`` (scalar or array)."""
    e = entry(name)
    p = e.params(params)
    _check_domain(e, x)
    xa = np.asarray(x, dtype=float)
    if xa.ndim and xa.size > 1:
        check_regular(name, p, xa)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        val = np.asarray(e.formula(p, xa), dtype=float)
    if not np.all(np.isfinite(val)):
        raise IrregularParameters(f"{name}: not finite at some x for {params}")
    return val if val.ndim else float(val)


def oracle_grid(name: str, params: Dict[str, float], grid: Grid) -> GridFn:
    return GridFn(grid, oracle_eval(name, params, grid.x))


# ------------------------------------------------------------- calibration

def gamma_engine(name: str, gamma_paper: float, a: float, params: Optional[Dict[str, float]] = None) -> float:
    """gamma_engine = gamma_paper + F(a), F being the entry's antiderivative of u^2."""
    e = entry(name)
    if e.F is None:
        raise OracleError(f"{name}: no antiderivative attached; gamma cannot be calibrated")
    p = e.params(dict(params or {}, gamma=gamma_paper))
    try:
        Fa = float(e.F(p, np.asarray(a, dtype=float)))
    except OracleError as exc:
        raise OracleError(f"{name}: F undefined at a={a} ({exc})") from None
    if not np.isfinite(Fa):
        raise OracleError(f"{name}: F undefined at a={a}")
    return gamma_paper + Fa


def gamma_paper(name: str, gamma_eng: float, a: float, params: Optional[Dict[str, float]] = None) -> float:
    return gamma_eng - (gamma_engine(name, 0.0, a, params))


def c1_engine(name: str, C1: float, C2: float, a: float, params: Dict[str, float]) -> float:
    """C1 after moving the C2 integral's anchor to the left node: C1 + C2 J(a)."""
    if C2 == 0:
        return C1
    e = entry(name)
    if e.J is None:
        raise OracleError(f"{name}: no C2 antiderivative attached")
    return C1 + C2 * float(e.J(e.params(params), np.asarray([a], dtype=float))[0])


# --------------------------------------------------------------- comparison

@dataclass(frozen=True)
class ComparisonReport:
    name: str
    params: Dict[str, float]
    sup_abs: float
    sup_rel: float
    worst_node: int
    x_worst: float
    metric: str
    tol: float
    passed: bool

    @property
    def value(self) -> float:
        return self.sup_abs if self.metric == "abs" else self.sup_rel


def compare(name: str, params: Dict[str, float], engine_output: GridFn, mask=None) -> ComparisonReport:
    """Engine samples vs the closed form on the nodes selected by ``mask``.

    sup_rel is normalized by the sup of the oracle over the mask.
    """
    e = entry(name)
    grid = engine_output.grid
    keep = np.zeros(grid.n, dtype=bool)
    if mask is None:
        keep[:] = True
    elif isinstance(mask, tuple):
        keep[mask[0]:mask[1]] = True
    else:
        keep[mask] = True
    idx = np.nonzero(keep)[0]
    x = grid.x[idx]
    ref = np.asarray(oracle_eval(name, params, x), dtype=float)
    got = engine_output.values[idx]
    diff = np.abs(got - ref)
    diff = np.where(np.isnan(diff), np.inf, diff)
    j = int(np.argmax(diff))
    sup_abs = float(diff[j])
    scale = float(np.max(np.abs(ref)))
    sup_rel = sup_abs / scale if scale > 0 else (0.0 if sup_abs == 0 else np.inf)
    metric, tol = e.tol
    val = sup_abs if metric == "abs" else sup_rel
    return ComparisonReport(name, dict(params), sup_abs, sup_rel, int(idx[j]), float(x[j]), metric, tol, val <= tol)


# -------------------------------------------------------- self-consistency

@dataclass(frozen=True)
class OraclePair:
    """Potential entry, solution entry, energy and the interval they are checked on."""

    label: str
    potential: str
    solution: str
    params: Dict[str, float]
    energy: float
    interval: Tuple[float, float]
    log_solution: bool = False  # solution entry returns -log(psi)


def _eps_of(p):
    return p["eps"]


PAIRS: List[OraclePair] = [
    OraclePair("rosu", "v3rosu", "solrosucon", {"c": 1.0, "gamma": 200.0}, 0.0, (0.0, 3.0)),
    OraclePair("conbound", "conbound-V3", "conbound-psi", {"c": 1.0, "eps": 0.6, "gamma": 200.0}, 0.6, (-3.0, 3.0)),
    OraclePair("general", "V3gen", "PSI",
               {"c": 1.0, "eps": 0.6, "gamma": 200.0, "k1": 1.0, "k2": 0.5, "C1": 1.0, "C2": 0.0}, 0.6, (0.0, 3.0)),
    OraclePair("general-C2", "seed-V3", "PSI",
               {"c": 1.0, "eps": 0.6, "gamma": 200.0, "k1": 1.0, "k2": 0.5, "C1": 1.0, "C2": 1.0}, 0.6, (0.0, 3.0)),
    OraclePair("hyperbolic", "hyperbolic-V3", "hyperbolic-psi", {"c": 1.0, "eps": 0.6, "gamma": 1.0}, 0.6, (0.0, 3.0)),
    OraclePair("trig", "trig-V3", "trig-psi", {"c": 1.0, "eps": 1.6, "gamma": 1.0}, 1.6, (0.0, 3.0)),
    OraclePair("dirac", "v3ex", "hatpsiex", {}, 0.0, (0.1, 3.0)),
    OraclePair("fok-k0", "v3fok", "solzerofok", {"k": 0, "gamma": -0.9, "C1": -0.25}, 0.0, (-4.0, 4.0)),
    OraclePair("fok-k0-C2", "v3fok", "solzerofok", {"k": 0, "gamma": -0.9, "C1": -0.25, "C2": 0.1}, 0.0, (-2.0, 2.0)),
    OraclePair("fok-k2", "v3fok", "solzerofok", {"k": 2, "gamma": 20.0, "C1": 20.0}, 4.0, (-4.0, 4.0)),
    OraclePair("drift-v0", "v3fok", "v0", {"k": 0, "gamma": -0.9}, 0.0, (-4.0, 4.0), log_solution=True),
    OraclePair("drift-v1", "v3fok", "v1", {"k": 1, "gamma": 0.1}, 2.0, (0.1, 4.0), log_solution=True),
]


@dataclass(frozen=True)
class PairReport:
    label: str
    potential: str
    solution: str
    residual: float
    tol: float

    @property
    def consistent(self) -> bool:
        return self.residual <= self.tol


def _scaled_residual(grid: Grid, V: np.ndarray, psi: np.ndarray, energy: float, band: int = 4) -> float:
    f = GridFn(grid, psi)
    r = deriv2(f).values + (energy - V) * psi
    d2 = np.abs(deriv2(f).values)
    sl = slice(band, -band)
    return float(np.max(np.abs(r[sl])) / (1.0 + np.max(d2[sl])))


def _seed_v3(p, x):
    """c^2 - 2 (log D)'' evaluated from u and F directly, not from a catalogued V3."""
    s = _s_below(p)
    u = p["k1"] * np.exp(s * x) + p["k2"] * np.exp(-s * x)
    du = s * (p["k1"] * np.exp(s * x) - p["k2"] * np.exp(-s * x))
    D = p["gamma"] + _F_gen(p, x)
    return p["c"] ** 2 - 4.0 * u * du / D + 2.0 * u ** 4 / D ** 2


_REFERENCE_POTENTIALS = {"seed-V3": _seed_v3}


def pair_consistency(pair: OraclePair, n: int = 4001) -> PairReport:
    """Scaled residual sup|psi'' + (E - V3) psi| / (1 + sup|psi''|) of a catalogued pair.

    ``seed-V3`` stands for the potential rebuilt from the seed and its
    antiderivative; pairing a catalogued solution with it isolates that
    solution from any defect of the catalogued potential.
    """
    grid = make_grid(*pair.interval, n)
    if pair.potential in _REFERENCE_POTENTIALS:
        V = _REFERENCE_POTENTIALS[pair.potential](pair.params, grid.x)
    else:
        V = oracle_eval(pair.potential, pair.params, grid.x)
    psi = oracle_eval(pair.solution, pair.params, grid.x)
    if pair.log_solution:
        psi = np.exp(-psi)
    return PairReport(pair.label, pair.potential, pair.solution,
                      _scaled_residual(grid, V, psi, pair.energy), PAIR_TOL)


def single_consistency(n: int = 4001) -> List[PairReport]:
    """Entries checked against an equation that is not itself an oracle."""
    out = []
    g = make_grid(0.0, 3.0, n)
    p = {"c": 1.0, "eps": 0.6, "k1": 1.0, "k2": 0.5}
    out.append(PairReport("solcon", "c^2", "solcon",
                          _scaled_residual(g, np.ones(n), oracle_eval("solcon", p, g.x), 0.6), PAIR_TOL))
    g = make_grid(0.1, 2.0, n)
    out.append(PairReport("phi1", "x^4-2x", "phi1",
                          _scaled_residual(g, g.x ** 4 - 2 * g.x, oracle_eval("phi1", {"k1": 1, "k2": 1, "m": 1}, g.x), 0.0),
                          PAIR_TOL))
    g = make_grid(0.1, 3.0, n)
    q = GridFn(g, oracle_eval("q1", {}, g.x))
    ident = q.values ** 2 + deriv1(q).values - oracle_eval("v3ex", {}, g.x)
    out.append(PairReport("q1", "v3ex", "q1", float(np.max(np.abs(ident[4:-4]))
                                                     / (1.0 + np.max(np.abs(oracle_eval("v3ex", {}, g.x))))), PAIR_TOL))
    return out


def consistency_table(n: int = 4001) -> Dict[str, bool]:
    """Entry name -> whether every catalogued pair it belongs to is self-consistent."""
    ok: Dict[str, bool] = {}
    for rep in [pair_consistency(p, n) for p in PAIRS] + single_consistency(n):
        for nm in (rep.potential, rep.solution):
            if nm in CATALOG:
                ok[nm] = ok.get(nm, True) and rep.consistent
    return ok


# ----------------------------------------------------------- singularities

def bracket_root(fun: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, samples: int = 20001) -> Optional[float]:
    """First zero of ``fun`` on [lo, hi] found by sign scanning plus brentq, or None."""
    x = np.linspace(lo, hi, samples)
    y = fun(x)
    exact = np.nonzero(y == 0)[0]
    if exact.size:
        return float(x[exact[0]])
    flips = np.nonzero(np.sign(y[:-1]) != np.sign(y[1:]))[0]
    if flips.size == 0:
        return None
    i = int(flips[0])
    return float(brentq(lambda t: float(fun(np.array([t]))[0]), x[i], x[i + 1]))


def denominator_root(name: str, params: Dict[str, float], lo: float, hi: float) -> Optional[float]:
    e = entry(name)
    if e.denominator is None:
        raise OracleError(f"{name} has no denominator")
    p = e.params(params)
    return bracket_root(lambda x: e.denominator(p, x), lo, hi)
