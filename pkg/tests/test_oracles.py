import math

import numpy as np
import pytest

from conftest import adaptive_simpson
from susy_forge import oracles as orc
from susy_forge.grid import GridFn, make_grid

# independent quadrature values, frozen (adaptive Simpson, see test_specfun)
E23_AT_23 = 0.48448446340147183
HATPSI_AT_1 = 0.2740135760497886
F_HERMITE2_AT_13 = 2.419327236681303

SPEC_NAMES = ["solcon", "v3rosu", "solrosucon", "V3gen", "PSI", "conbound-V3", "conbound-psi",
              "hyperbolic-V3", "hyperbolic-psi", "trig-V3", "trig-psi", "phi1", "hatpsiex", "v3ex",
              "q1", "v3fok", "solzerofok", "v0", "v1"]


def test_catalog_complete():
    assert sorted(orc.CATALOG) == sorted(SPEC_NAMES)
    for name in SPEC_NAMES:
        e = orc.entry(name)
        assert e.tol[0] in ("abs", "rel") and e.tol[1] in (1e-8, 1e-6)


def test_point_values():
    assert orc.oracle_eval("v3rosu", {"c": 1, "gamma": 200}, 0.0) == pytest.approx(1 + 8 / 399 + 8 / 399 ** 2, abs=1e-14)
    assert orc.oracle_eval("solrosucon", {"c": 1, "gamma": 200}, 0.0) == pytest.approx(2 / 399, abs=1e-16)
    assert orc.oracle_eval("v0", {}, 0.0) == pytest.approx(math.log(18 / 5), abs=1e-15)


def test_expint_entry_against_frozen_quadrature():
    assert orc.oracle_eval("hatpsiex", {}, 1.0) == pytest.approx(HATPSI_AT_1, rel=1e-10)
    assert 3 * math.exp(-1 / 3) / (3 + 10 * E23_AT_23) == pytest.approx(HATPSI_AT_1, rel=1e-15)


def test_hermite_antiderivative_against_quadrature():
    f = orc.entry("v3fok").F
    assert float(f({"k": 2}, np.array(1.3))) == pytest.approx(F_HERMITE2_AT_13, rel=1e-12)
    for k in (0, 1, 3):
        H = {0: lambda t: 1.0, 1: lambda t: 2 * t, 3: lambda t: 8 * t ** 3 - 12 * t}[k]
        ref = adaptive_simpson(lambda t: math.exp(-t * t) * H(t) ** 2, 0.0, 2.1)
        assert float(f({"k": k}, np.array(2.1))) == pytest.approx(ref, rel=1e-11)


def test_unknown_entry_and_missing_params():
    with pytest.raises(orc.OracleError):
        orc.entry("nope")
    with pytest.raises(orc.OracleError):
        orc.oracle_eval("v3rosu", {"c": 1.0}, 0.0)


def test_domain_checked():
    with pytest.raises(orc.OracleError):
        orc.oracle_eval("hatpsiex", {}, -1.0)
    with pytest.raises(orc.OracleError):
        orc.oracle_eval("v1", {}, np.array([-0.5, 0.5]))


def test_irregular_parameters_flagged():
    # 2 c gamma e^{2cx} - 1 vanishes at x = log(5)/2 for gamma = 0.1
    with pytest.raises(orc.IrregularParameters):
        orc.oracle_eval("v3rosu", {"c": 1, "gamma": 0.1}, np.linspace(0, 3, 301))
    with pytest.raises(orc.IrregularParameters):
        orc.check_regular("solrosucon", {"c": 1, "gamma": 0.1}, np.array([0.5, 1.0]))
    orc.check_regular("solrosucon", {"c": 1, "gamma": 0.1}, np.array([1.0, 3.0]))


def test_calibration_round_trip():
    p = {"c": 1.0}
    assert orc.gamma_engine("v3rosu", 200.0, 0.0, p) == pytest.approx(199.5, abs=1e-14)
    for name, params, a in [("conbound-V3", {"c": 1, "eps": 0.6}, -3.0), ("v3fok", {"k": 0}, -4.0),
                            ("hatpsiex", {}, 0.05), ("v3fok", {"k": 2}, -4.0)]:
        ge = orc.gamma_engine(name, 1.7, a, params)
        assert orc.gamma_paper(name, ge, a, params) == pytest.approx(1.7, abs=1e-12)


def test_calibration_needs_antiderivative():
    with pytest.raises(orc.OracleError):
        orc.gamma_engine("solcon", 1.0, 0.0, {"c": 1, "eps": 0.6, "k1": 1, "k2": 1})
    with pytest.raises(orc.OracleError):
        orc.gamma_engine("hatpsiex", 1.0, -1.0)


def test_compare_identical_is_zero():
    g = make_grid(0, 3, 301)
    p = {"c": 1, "gamma": 200}
    rep = orc.compare("v3rosu", p, orc.oracle_grid("v3rosu", p, g))
    assert rep.sup_abs == 0.0 and rep.sup_rel == 0.0 and rep.passed


def test_compare_reports_worst_node_and_mask():
    g = make_grid(0, 3, 301)
    p = {"c": 1, "gamma": 200}
    vals = orc.oracle_grid("v3rosu", p, g).values.copy()
    vals[10] += 1e-3
    rep = orc.compare("v3rosu", p, GridFn(g, vals))
    assert rep.worst_node == 10 and rep.sup_abs == pytest.approx(1e-3) and not rep.passed
    assert orc.compare("v3rosu", p, GridFn(g, vals), (20, 301)).passed


@pytest.mark.parametrize("label", ["rosu", "conbound", "trig", "dirac", "fok-k0", "fok-k2", "drift-v0", "drift-v1"])
def test_consistent_pairs(label):
    pair = next(p for p in orc.PAIRS if p.label == label)
    assert orc.pair_consistency(pair).consistent


@pytest.mark.parametrize("label", ["general", "general-C2", "hyperbolic", "fok-k0-C2"])
def test_defective_pairs_are_detected(label):
    # these catalogued closed forms fail their own transformed equation
    pair = next(p for p in orc.PAIRS if p.label == label)
    rep = orc.pair_consistency(pair)
    assert not rep.consistent and rep.residual > 100 * rep.tol


def test_single_entry_consistency():
    assert all(r.consistent for r in orc.single_consistency())


def test_bracket_root():
    assert orc.bracket_root(np.sin, 2.0, 4.0) == pytest.approx(math.pi, abs=1e-12)
    assert orc.bracket_root(lambda x: 1 + x * x, -5, 5) is None


def _gammas(seed):
    return np.random.default_rng(seed).uniform(-50, 50, 20)


def test_hyperbolic_always_singular():
    p = {"c": 1.0, "eps": 0.6}
    s = math.sqrt(0.4)
    for g in _gammas(101):
        root = orc.denominator_root("hyperbolic-V3", dict(p, gamma=g), -10, 10)
        assert root is not None
        assert abs(s * (g + 2 * root) + math.sinh(2 * s * root)) <= 1e-9 * (1 + abs(g))


def test_trigonometric_always_singular():
    p = {"c": 1.0, "eps": 1.6}
    s = math.sqrt(0.6)
    for g in _gammas(102):
        root = orc.denominator_root("trig-V3", dict(p, gamma=g), -100, 100)
        assert root is not None
        assert abs(2 * s * (2 * g + root) - math.sin(2 * s * root)) <= 1e-9 * (1 + abs(g))


def test_bound_state_needs_positive_gamma():
    p = {"c": 1.0, "eps": 0.6}
    for g in _gammas(103):
        root = orc.denominator_root("conbound-V3", dict(p, gamma=g), -50, 50)
        assert (root is None) == (g > 0)
