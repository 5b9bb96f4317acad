import numpy as np
import pytest

from conftest import adaptive_simpson
from susy_forge.grid import GridFn, cumint, make_grid, sup_diff
from susy_forge.schrodinger import (
    BLOWUP,
    CauchyData,
    PotentialSpec,
    SolutionPair,
    residual,
    residual_check,
    solve_inhomogeneous,
    solve_ivp,
    wronskian2,
)

C1 = PotentialSpec.constant(1.0)


def test_decaying_exponential():
    g = make_grid(0, 3, 4001)
    s = solve_ivp(C1, 0.0, CauchyData(0.0, 1.0, -1.0), g)
    assert np.max(np.abs(s.psi.values - np.exp(-g.x))) <= 1e-9
    assert np.max(np.abs(s.dpsi.values + np.exp(-g.x))) <= 1e-8


def test_free_constant():
    g = make_grid(0, 2, 201)
    s = solve_ivp(PotentialSpec.constant(0.0), 0.0, CauchyData(0.0, 1.0, 0.0), g)
    assert np.max(np.abs(s.psi.values - 1.0)) <= 1e-13


def test_oscillator_ground_state():
    g = make_grid(-4, 4, 4001)
    s = solve_ivp(PotentialSpec.oscillator_fp(), 0.0, CauchyData(0.0, 1.0, 0.0), g)
    assert np.max(np.abs(s.psi.values - np.exp(-g.x ** 2 / 2))) <= 1e-8


def test_interior_anchor_integrates_both_ways():
    g = make_grid(-1, 2, 3001)
    s = solve_ivp(PotentialSpec.constant(2.0), 1.0, CauchyData(0.5, 0.0, 1.0), g)
    exact = np.sinh(np.sqrt(3.0) * (g.x - 0.5)) / np.sqrt(3.0)
    assert np.max(np.abs(s.psi.values - exact)) <= 1e-9


def test_cauchy_data_rejects_zero():
    with pytest.raises(ValueError):
        CauchyData(0.0, 0.0, 0.0)


def test_numerov_fourth_order():
    V = PotentialSpec.oscillator_fp()
    sups = []
    for n in (101, 201, 401):
        g = make_grid(-3, 3, n)
        s = solve_ivp(V, 0.0, CauchyData(0.0, 1.0, 0.0), g)
        sups.append(np.nanmax(np.abs(residual(V, 0.0, s.psi).values)))
    assert sups[0] / sups[1] >= 12 and sups[1] / sups[2] >= 12


def test_wronskian_exponentials():
    g = make_grid(0, 3, 4001)
    f = solve_ivp(C1, 0.0, CauchyData(0.0, 1.0, 1.0), g)
    h = solve_ivp(C1, 0.0, CauchyData(0.0, 1.0, -1.0), g)
    w = wronskian2(f, h).values
    assert np.max(np.abs(w + 2.0)) / 2.0 <= 1e-8
    assert np.max(np.abs(wronskian2(f, f).values)) == 0.0


def test_wronskian_constancy_distinct_data(rng):
    g = make_grid(-2, 2, 4001)
    V = PotentialSpec.quartic_dirac()
    for _ in range(5):
        a, b = rng.normal(size=2), rng.normal(size=2)
        f = solve_ivp(V, 0.3, CauchyData(0.0, *a), g)
        h = solve_ivp(V, 0.3, CauchyData(0.0, *b), g)
        w = wronskian2(f, h).values
        assert np.std(w) / abs(np.mean(w)) <= 1e-8


def test_inhomogeneous_quadratic():
    g = make_grid(0, 2, 401)
    src = GridFn(g, -np.ones(g.n))
    s = solve_inhomogeneous(PotentialSpec.constant(0.0), 0.0, src, CauchyData(0.0, 0.0, 1e-300), g)
    assert np.max(np.abs(s.psi.values + g.x ** 2 / 2)) <= 1e-12


def test_inhomogeneous_zero_source_is_homogeneous():
    g = make_grid(0, 3, 1001)
    ic = CauchyData(0.0, 1.0, -0.3)
    a = solve_inhomogeneous(C1, 0.2, GridFn(g, np.zeros(g.n)), ic, g)
    b = solve_ivp(C1, 0.2, ic, g)
    assert np.max(np.abs(a.psi.values - b.psi.values)) <= 1e-12 * np.max(np.abs(b.psi.values))


def test_inhomogeneous_variation_of_parameters():
    # u1'' - u1 = -e^{-x}, u1(0) = u1'(0) = 0: u1(x) = int_0^x sinh(x - t) (-e^{-t}) dt
    g = make_grid(0, 3, 3001)
    src = GridFn(g, -np.exp(-g.x))
    s = solve_inhomogeneous(C1, 0.0, src, CauchyData(0.0, 0.0, 1e-300), g)
    for x in (0.5, 1.7, 3.0):
        ref = adaptive_simpson(lambda t: -np.sinh(x - t) * np.exp(-t), 0.0, x)
        assert abs(s.psi.values[g.index_of(x)] - ref) <= 1e-9


def test_inhomogeneous_wronskian_identity():
    # u'' = (V - lam) u and u1'' = (V - lam) u1 - u give W(u1, u)' = u^2
    g = make_grid(0, 3, 4001)
    u = solve_ivp(C1, 0.0, CauchyData(0.0, 1.0, -1.0), g)
    u1 = solve_inhomogeneous(C1, 0.0, -u.psi, CauchyData(0.0, 0.0, -2.0), g)
    w = (wronskian2(u1, u) - cumint(u.psi ** 2, 0)).values
    assert np.max(w) - np.min(w) <= 1e-6
    assert w[0] == pytest.approx(2.0, abs=1e-12)


def test_residual_exact_and_zero():
    g = make_grid(0, 3, 4001)
    s = solve_ivp(C1, 0.0, CauchyData(0.0, 1.0, -1.0), g)
    assert residual_check(s) <= 1e-6
    z = residual(C1, 0.0, GridFn(g, np.zeros(g.n)))
    assert np.nanmax(np.abs(z.values)) == 0.0
    assert np.isnan(z.values[:4]).all() and np.isnan(z.values[-4:]).all()


def test_residual_perturbation():
    g = make_grid(0, 3, 3001)
    psi = GridFn(g, 1.0 + 1e-3 * np.sin(g.x))
    r = residual(PotentialSpec.constant(0.0), 0.0, psi).values
    sl = slice(4, -4)
    expected = -1e-3 * np.sin(g.x[sl])
    big = np.abs(expected) > 1e-4
    assert np.all(np.abs(r[sl][big] - expected[big]) <= 0.05 * np.abs(expected[big]))


def test_overflow_is_flagged_per_node():
    g = make_grid(0, 800, 8001)
    s = solve_ivp(C1, 0.0, CauchyData(0.0, 1.0, 1.0), g)
    assert s.blew_up
    first = int(np.argmax(s.overflow))
    assert np.all(s.overflow[first:]) and not s.overflow[:first].any()
    assert np.isnan(s.psi.values[first:]).all()
    assert np.all(np.abs(s.psi.values[:first]) <= BLOWUP)


def test_potential_specs():
    x = np.array([0.0, 1.0, 2.0])
    assert np.allclose(PotentialSpec.quartic_dirac()(x), x ** 4 - 2 * x)
    assert np.allclose(PotentialSpec.oscillator_fp()(x), x ** 2 - 1)
    assert np.allclose(PotentialSpec.constant(1.5)(x), 2.25)


def test_tabulated_potential_from_csv(tmp_path):
    p = tmp_path / "V.csv"
    x = np.linspace(-1, 1, 201)
    p.write_text("x,V\n" + "\n".join(f"{float(a)!r},{float(a * a)!r}" for a in x) + "\n")
    V = PotentialSpec.from_csv(p)
    g = make_grid(-0.5, 0.5, 11)
    assert np.max(np.abs(V.on(g).values - g.x ** 2)) <= 1e-10
