"""Command-line front end.

    susy-forge [--config FILE] transform | gamma-scan | dirac | fokker-planck | verify [options]

Exit codes: 0 success, 2 singular gamma / non-positive transformed state
(or a residual above tolerance under --strict), 3 configuration error.
"""
from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import oracles as orc
from . import verify as ver
from .confluent import (
    NodeObstructionError,
    SingularGammaWarning,
    build_seed,
    missing_state,
    transform_at_energy,
)
from .dirac import DegenerateSpinorError, PseudoscalarSystem, seed_from_spinor, spinor_at_Em, transformed_q
from .fokker_planck import DriftSystem, NonPositiveStateError, fp_residual, transformed_drift, working_domain
from .grid import GridError, make_grid, read_gridfn
from .output import transform_columns, transform_sidecar, write_csv, write_json
from .schrodinger import CauchyData, PotentialSpec, solve_ivp
from .specfun import DomainError
from .systems import BUILTIN_SYSTEMS, SEEDS, builtin_seed

EXIT_OK, EXIT_SINGULAR, EXIT_CONFIG = 0, 2, 3
OUT_ENV = "SUSY_FORGE_OUT"
CONFIG_SECTION = "susy-forge"


class ConfigError(Exception):
    pass


class SingularRun(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


# ------------------------------------------------------------------ config

_FLOAT_KEYS = {"lambda_", "epsilon", "gamma", "C1", "C2", "c", "m", "E", "k1", "k2", "k1_new", "k2_new"}
_INT_KEYS = {"n", "k", "count"}
_PAIR_KEYS = {"domain", "gamma_range"}
_BOOL_KEYS = {"strict", "allow_singular", "allow_nodes", "json"}
_KEY_ALIASES = {"lambda": "lambda_", "gamma-convention": "gamma_convention", "seed-ic": "seed_ic",
                "potential-file": "potential_file", "gamma-range": "gamma_range", "q-file": "q_file",
                "allow-singular": "allow_singular", "allow-nodes": "allow_nodes", "psi-ic": "psi_ic"}


def _numbers(text: str, count: int, key: str) -> Tuple[float, ...]:
    parts = text.replace(",", " ").split()
    try:
        vals = tuple(float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"{key}: expected {count} numbers, got {text!r}") from None
    if len(vals) != count:
        raise ConfigError(f"{key}: expected {count} numbers, got {text!r}")
    return vals


def load_config(path: Optional[str]) -> Dict[str, object]:
    """Flat key = value file; an optional [susy-forge] header is accepted."""
    if not path:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    cp = configparser.ConfigParser()
    cp.optionxform = str
    if not text.lstrip().startswith("["):
        text = f"[{CONFIG_SECTION}]\n" + text
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None
    raw: Dict[str, str] = {}
    for sec in cp.sections():
        raw.update(cp[sec])
    out: Dict[str, object] = {}
    for key, val in raw.items():
        k = _KEY_ALIASES.get(key, key.replace("-", "_"))
        try:
            if k in _FLOAT_KEYS:
                out[k] = float(val)
            elif k in _INT_KEYS:
                out[k] = int(val)
            elif k in _PAIR_KEYS:
                out[k] = _numbers(val, 2, key)
            elif k in ("seed_ic", "psi_ic"):
                out[k] = _numbers(val, 3, key)
            elif k in _BOOL_KEYS:
                out[k] = val.strip().lower() in ("1", "true", "yes", "on")
            else:
                out[k] = val.strip()
        except ValueError:
            raise ConfigError(f"config key {key}: cannot parse {val!r}") from None
    return out


@dataclass
class RunConfig:
    system: str = "constant"
    potential_file: Optional[str] = None
    domain: Optional[Tuple[float, float]] = None
    n: int = 4001
    lambda_: Optional[float] = None
    epsilon: Optional[float] = None
    gamma: Optional[float] = None
    gamma_convention: str = "engine"
    C1: float = 1.0
    C2: float = 0.0
    seed: Optional[str] = None
    seed_ic: Optional[Tuple[float, float, float]] = None
    psi_ic: Optional[Tuple[float, float, float]] = None
    output: str = "."
    c: float = 1.0
    k1: Optional[float] = None
    k2: Optional[float] = None
    strict: bool = False
    allow_singular: bool = False
    extra: Dict[str, object] = field(default_factory=dict)

    def out_dir(self) -> Path:
        return Path(os.environ.get(OUT_ENV) or self.output)


_RUN_FIELDS = set(RunConfig.__dataclass_fields__) - {"extra"}


def merge(args: argparse.Namespace, cfg: Dict[str, object]) -> RunConfig:
    """Flags win over the config file, which wins over defaults."""
    values = dict(cfg)
    for k, v in vars(args).items():
        if v is not None and k not in ("command", "config", "func"):
            values[k] = v
    rc = RunConfig()
    for k, v in values.items():
        if k in _RUN_FIELDS:
            setattr(rc, k, v)
        else:
            rc.extra[k] = v
    if rc.gamma_convention not in ("engine", "paper"):
        raise ConfigError(f"gamma convention must be engine or paper, got {rc.gamma_convention!r}")
    if rc.n < 5:
        raise ConfigError("n must be at least 5")
    return rc


# ----------------------------------------------------------------- seeding

@dataclass
class Prepared:
    u: object
    oracle: Optional[str]
    oracle_params: Dict[str, float]
    gamma_engine: float
    gamma_paper: Optional[float]


def _grid(rc: RunConfig, default: Tuple[float, float]):
    a, b = rc.domain if rc.domain is not None else default
    try:
        return make_grid(a, b, rc.n)
    except GridError as exc:
        raise ConfigError(str(exc)) from None


def _potential(rc: RunConfig) -> PotentialSpec:
    if rc.potential_file:
        try:
            return PotentialSpec.from_csv(rc.potential_file)
        except (OSError, GridError) as exc:
            raise ConfigError(f"cannot use potential file: {exc}") from None
    if rc.system not in BUILTIN_SYSTEMS:
        raise ConfigError(f"unknown system {rc.system!r}; choose from {BUILTIN_SYSTEMS} or --potential-file")
    if rc.system == "constant":
        return PotentialSpec.constant(rc.c)
    return PotentialSpec.builtin(rc.system)


def _calibrate(rc: RunConfig, a: float, oracle: Optional[str], params: Dict[str, float]) -> Tuple[float, Optional[float]]:
    if rc.gamma is None:
        raise ConfigError("--gamma is required")
    if oracle is None:
        if rc.gamma_convention == "paper":
            raise ConfigError("--gamma-convention paper needs a builtin seed with a closed-form antiderivative")
        return rc.gamma, None
    try:
        if rc.gamma_convention == "paper":
            return orc.gamma_engine(oracle, rc.gamma, a, params), rc.gamma
        return rc.gamma, orc.gamma_paper(oracle, rc.gamma, a, params)
    except orc.OracleError as exc:
        if rc.gamma_convention == "paper":
            raise ConfigError(str(exc)) from None
        return rc.gamma, None


def prepare_seed(rc: RunConfig, grid) -> Prepared:
    if rc.seed_ic is not None:
        if rc.lambda_ is None:
            raise ConfigError("--seed-ic needs --lambda")
        try:
            ic = CauchyData(*rc.seed_ic)
            u = solve_ivp(_potential(rc), rc.lambda_, ic, grid)
        except (GridError, ValueError) as exc:
            raise ConfigError(f"bad seed: {exc}") from None
        oracle, params = None, {}
    else:
        if rc.potential_file:
            raise ConfigError("a tabulated potential needs --seed-ic")
        p = {"c": rc.c, "eps": rc.lambda_, "k": rc.extra.get("k", 0), "m": rc.extra.get("m", 1.0)}
        if rc.k1 is not None:
            p["k1"] = rc.k1
        if rc.k2 is not None:
            p["k2"] = rc.k2
        try:
            s = builtin_seed(rc.system, grid, rc.seed, **{k: v for k, v in p.items() if v is not None})
        except (ValueError, DomainError) as exc:
            raise ConfigError(str(exc)) from None
        u, oracle, params = s.u, s.oracle, s.oracle_params
    ge, gp = _calibrate(rc, grid.a, oracle, params)
    return Prepared(u, oracle, params, ge, gp)


def _default_domain(rc: RunConfig) -> Tuple[float, float]:
    if rc.system == "oscillator_fp":
        return working_domain(int(rc.extra.get("k", 0)))
    if rc.system == "quartic_dirac":
        return (0.05, 3.0)
    return (0.0, 3.0)


def _build(rc: RunConfig, prep: Prepared):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SingularGammaWarning)
        seed = build_seed(prep.u, prep.gamma_engine)
    if not seed.is_regular and not rc.allow_singular:
        raise SingularRun(f"gamma_engine={prep.gamma_engine:.17g} makes D vanish on the grid "
                          f"(min|D| = {seed.min_abs_D:.3g}); use --allow-singular to write anyway")
    return seed


def _transform(rc: RunConfig, prep: Prepared, seed, grid):
    try:
        if rc.epsilon is None or rc.epsilon == seed.lam:
            return missing_state(seed, rc.C1, rc.C2)
        ic = CauchyData(*(rc.psi_ic or (grid.a, 1.0, 0.0)))
        psi = solve_ivp(prep.u.potential, rc.epsilon, ic, grid)
        return transform_at_energy(seed, psi)
    except NodeObstructionError as exc:
        raise ConfigError(f"{exc} at {exc.interval}") from None
    except (ValueError, GridError) as exc:
        raise ConfigError(str(exc)) from None


def _check_strict(rc: RunConfig, out) -> None:
    if rc.strict and not out.ok:
        raise SingularRun(f"residual {out.residual_sup:.3g} above tolerance {out.tolerance:.3g}")


# ---------------------------------------------------------------- commands

def cmd_transform(rc: RunConfig) -> int:
    grid = _grid(rc, _default_domain(rc))
    prep = prepare_seed(rc, grid)
    seed = _build(rc, prep)
    out = _transform(rc, prep, seed, grid)
    _check_strict(rc, out)
    d = rc.out_dir()
    write_csv(d / "transform.csv", transform_columns(out))
    write_json(d / "transform.json", transform_sidecar(out, prep.gamma_paper))
    print(f"transform: residual_sup={out.residual_sup:.3e} (tol {out.tolerance:.3e}), "
          f"singular nodes={out.singular_nodes.size}, wrote {d / 'transform.csv'}")
    return EXIT_OK


def _scan_point(rc: RunConfig, u, gamma_engine: float):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SingularGammaWarning)
        seed = build_seed(u, gamma_engine)
    c2 = rc.C2 if seed.is_regular else 0.0
    try:
        out = missing_state(seed, rc.C1, c2)
        res = out.residual_sup
    except NodeObstructionError:
        res = float("nan")
    return seed.is_regular, seed.min_abs_D, res


def cmd_gamma_scan(rc: RunConfig) -> int:
    rng = rc.extra.get("gamma_range")
    count = int(rc.extra.get("count", 11))
    if rng is None or not rng[0] < rng[1] or count < 1:
        raise ConfigError("gamma-scan needs --gamma-range LO HI with LO < HI and --count >= 1")
    grid = _grid(rc, _default_domain(rc))
    rc.gamma = 0.0
    prep = prepare_seed(rc, grid)
    gammas = np.linspace(rng[0], rng[1], count)
    offset = 0.0
    if rc.gamma_convention == "paper":
        offset = prep.gamma_engine  # gamma_engine(0) = F(a)
    rows = [_scan_point(rc, prep.u, g + offset) for g in gammas]
    d = rc.out_dir()
    write_csv(d / "scan.csv", {
        "gamma": gammas,
        "regular": np.array([1.0 if r[0] else 0.0 for r in rows]),
        "min_abs_D": np.array([r[1] for r in rows]),
        "residual_sup": np.array([r[2] for r in rows]),
    })
    print(f"gamma-scan: {sum(r[0] for r in rows)}/{count} regular ({rc.gamma_convention} gamma), "
          f"wrote {d / 'scan.csv'}")
    return EXIT_OK


def cmd_dirac(rc: RunConfig) -> int:
    m = float(rc.extra.get("m", 1.0))
    E = float(rc.extra.get("E", m))
    k1 = 1.0 if rc.k1 is None else rc.k1
    k2 = 0.0 if rc.k2 is None else rc.k2
    grid = _grid(rc, (0.05, 3.0))
    q_file = rc.extra.get("q_file")
    try:
        if q_file:
            sys_ = PseudoscalarSystem(read_gridfn(q_file).resample(grid), m, E, grid)
        else:
            sys_ = PseudoscalarSystem.inverted_oscillator(grid, m, E)
    except (ValueError, OSError, GridError) as exc:
        raise ConfigError(str(exc)) from None
    if not sys_.at_threshold:
        raise ConfigError(f"closed-form spinors need |E| = m (E={E}, m={m})")
    if k1 == 0 and k2 == 0:
        raise ConfigError("k1 = k2 = 0 gives the zero spinor")
    if q_file:
        u = seed_from_spinor(sys_, spinor_at_Em(sys_, k1, k2))
        prep = Prepared(u, None, {}, *_calibrate(rc, grid.a, None, {}))
    else:
        rc.system = "quartic_dirac"
        rc.k1, rc.k2 = k1, k2
        rc.extra["m"] = m
        if E < 0:
            raise ConfigError("the builtin seed is built at E = +m")
        prep = prepare_seed(rc, grid)
    seed = _build(rc, prep)
    out = _transform(rc, prep, seed, grid)
    _check_strict(rc, out)
    try:
        q1 = transformed_q(out)
    except ValueError as exc:
        raise SingularRun(str(exc)) from None
    new = PseudoscalarSystem(q1, m, m)
    kn1 = rc.extra.get("k1_new", float(out.psi_hat.values[0]))
    kn2 = rc.extra.get("k2_new", 0.0)
    sp = spinor_at_Em(new, kn1, kn2)
    d = rc.out_dir()
    write_csv(d / "dirac.csv", {"x": grid.x, "q0": sys_.q_on_grid().values, "q1": q1.values,
                                "phi1": sp.phi1.values, "phi2": sp.phi2.values})
    side = transform_sidecar(out, prep.gamma_paper)
    side.update({"m": m, "E": E, "k1": k1, "k2": k2, "gamma": side["gamma_engine"],
                 "k1_new": kn1, "k2_new": kn2})
    write_json(d / "dirac.json", side)
    print(f"dirac: residual_sup={out.residual_sup:.3e}, wrote {d / 'dirac.csv'}")
    return EXIT_OK


def cmd_fokker_planck(rc: RunConfig) -> int:
    k = rc.extra.get("k", 0)
    if int(k) != k or k < 0:
        raise ConfigError(f"k must be a nonnegative integer, got {k}")
    k = int(k)
    rc.system = "oscillator_fp"
    grid = _grid(rc, working_domain(k))
    prep = prepare_seed(rc, grid)
    seed = _build(rc, prep)
    out = _transform(rc, prep, seed, grid)
    _check_strict(rc, out)
    try:
        st = transformed_drift(out, k, allow_nodes=bool(rc.extra.get("allow_nodes", False)))
    except NonPositiveStateError as exc:
        raise SingularRun(f"{exc}; intervals {exc.intervals}") from None
    res = fp_residual(st)
    drift = DriftSystem("harmonic", k, grid)
    d = rc.out_dir()
    write_csv(d / "fp.csv", {"x": grid.x, "U": drift.U_on_grid().values, "Vdrift": st.Vdrift.values,
                             "g": st.g.values, "residual": res.values})
    write_json(d / "fp.json", {"k": k, "gamma_engine": prep.gamma_engine, "gamma_paper": prep.gamma_paper,
                               "C1": rc.C1, "C2": rc.C2, "time_factor_rate": drift.time_factor_rate,
                               "residual_sup": float(np.nanmax(np.abs(res.values)))})
    print(f"fokker-planck: stationary residual={np.nanmax(np.abs(res.values)):.3e}, wrote {d / 'fp.csv'}")
    return EXIT_OK


def cmd_verify(rc: RunConfig) -> int:
    names = rc.extra.get("entries") or ["all"]
    selection = None if list(names) == ["all"] else list(names)
    try:
        rows = ver.run(selection, rc.n)
    except orc.OracleError as exc:
        raise ConfigError(str(exc)) from None
    if rc.extra.get("json"):
        print(json.dumps([r.as_dict() for r in rows], indent=2, default=float))
    else:
        print(ver.format_table(rows))
    return EXIT_OK if ver.exit_ok(rows) else 1


COMMANDS = {"transform": cmd_transform, "gamma-scan": cmd_gamma_scan, "dirac": cmd_dirac,
            "fokker-planck": cmd_fokker_planck, "verify": cmd_verify}


# ------------------------------------------------------------------ parser

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--system", choices=BUILTIN_SYSTEMS)
    p.add_argument("--potential-file", dest="potential_file", help="CSV with columns x,V")
    p.add_argument("--domain", type=float, nargs=2, metavar=("A", "B"))
    p.add_argument("--n", type=int)
    p.add_argument("--lambda", dest="lambda_", type=float, help="factorization energy")
    p.add_argument("--epsilon", type=float, help="energy of the transformed state (default: lambda)")
    p.add_argument("--gamma", type=float)
    p.add_argument("--gamma-convention", dest="gamma_convention", choices=("engine", "paper"))
    p.add_argument("--C1", type=float)
    p.add_argument("--C2", type=float)
    p.add_argument("--seed", help="builtin seed name: " + "; ".join(f"{k}: {', '.join(v)}" for k, v in SEEDS.items()))
    p.add_argument("--seed-ic", dest="seed_ic", type=float, nargs=3, metavar=("X0", "VALUE", "SLOPE"))
    p.add_argument("--psi-ic", dest="psi_ic", type=float, nargs=3, metavar=("X0", "VALUE", "SLOPE"))
    p.add_argument("--c", type=float, help="constant potential V = c^2")
    p.add_argument("--k1", type=float)
    p.add_argument("--k2", type=float)
    p.add_argument("--output", help=f"output directory (the {OUT_ENV} variable overrides it)")
    p.add_argument("--strict", action="store_true", default=None)
    p.add_argument("--allow-singular", dest="allow_singular", action="store_true", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="susy-forge", description="Confluent second-order Darboux transformations.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, helptext in [("transform", "transformed potential and solution"),
                           ("gamma-scan", "regularity of D = gamma + int u^2 over a gamma range"),
                           ("dirac", "pseudoscalar Dirac example at |E| = m"),
                           ("fokker-planck", "transformed drift and stationary density"),
                           ("verify", "engine vs closed forms")]:
        p = sub.add_parser(name, help=helptext)
        _common(p)
        if name == "gamma-scan":
            p.add_argument("--gamma-range", dest="gamma_range", type=float, nargs=2, metavar=("LO", "HI"))
            p.add_argument("--count", type=int)
            p.add_argument("--k", type=int, help="Hermite index for the oscillator_fp seed")
            p.add_argument("--m", type=float)
        if name == "dirac":
            p.add_argument("--m", type=float)
            p.add_argument("--E", type=float)
            p.add_argument("--q-file", dest="q_file", help="CSV with columns x,q")
            p.add_argument("--k1-new", dest="k1_new", type=float)
            p.add_argument("--k2-new", dest="k2_new", type=float)
        if name in ("fokker-planck", "transform"):
            p.add_argument("--k", type=float, help="separation rate / Hermite index")
        if name == "fokker-planck":
            p.add_argument("--allow-nodes", dest="allow_nodes", action="store_true", default=None,
                           help="accept sign changes of psi_hat (excited seeds); V = -log|psi_hat|")
        if name == "verify":
            p.add_argument("entries", nargs="*", help="entry names or 'all'")
            p.add_argument("--json", action="store_true", default=None)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_CONFIG
    try:
        rc = merge(args, load_config(args.config))
        return COMMANDS[args.command](rc)
    except ConfigError as exc:
        print(f"susy-forge: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SingularRun as exc:
        print(f"susy-forge: {exc}", file=sys.stderr)
        return EXIT_SINGULAR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
