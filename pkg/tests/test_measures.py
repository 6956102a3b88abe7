import math

import numpy as np
import pytest

from boolemaps import (
    AlphaBetaDensity,
    BooleMap1D,
    CauchyDensity,
    ClassicalBoole,
    ErgodicityClass,
    GaussDensity,
    GridDensity,
    LebesgueUnit,
    QuasiMeasureDensity,
    SpecialBoole,
    classify_ergodicity,
    complex_fixed_points,
    density_eval,
    density_integral,
    quasi_measure_from_fixed_point,
    verify_invariant_density,
)
from boolemaps.measures import density_from_dict


def test_density_eval_reference_points():
    assert density_eval(CauchyDensity(0.0, 1.0), 0.0) == pytest.approx(1.0 / math.pi, rel=1e-15)
    assert density_eval(GaussDensity(), 1e-12) == pytest.approx(1.0 / math.log(2.0), rel=1e-9)
    # Im[(-1/pi)/(i - 0)] = Im[(-1/pi)(-i)] = 1/pi
    q = QuasiMeasureDensity(omega=1j)
    assert density_eval(q, 0.0) == pytest.approx(1.0 / math.pi, rel=1e-15)
    assert density_eval(LebesgueUnit(), 5.0) == 1.0


def test_density_integrals_closed_forms():
    assert density_integral(CauchyDensity(0.0, 1.0), (-math.inf, math.inf)) == pytest.approx(1.0, abs=1e-14)
    assert density_integral(CauchyDensity(0.0, 1.0), (0.0, math.inf)) == pytest.approx(0.5, abs=1e-14)
    assert density_integral(GaussDensity(), (0.0, 1.0)) == pytest.approx(1.0, abs=1e-14)
    assert density_integral(LebesgueUnit(), (2.0, 5.0)) == 3.0
    q = QuasiMeasureDensity(omega=2.0 + 3.0j)
    assert density_integral(q, (-math.inf, math.inf)) == pytest.approx(1.0, abs=1e-14)
    # finite piece agrees with quadrature oracle
    from scipy.integrate import quad
    val, _ = quad(q, -5.0, 7.0)
    assert density_integral(q, (-5.0, 7.0)) == pytest.approx(val, abs=1e-10)


def test_grid_density_interp_and_integral():
    g = GridDensity((0.0, 1.0, 2.0), (0.0, 1.0, 0.0))
    assert g(0.5) == pytest.approx(0.5)
    assert g(-1.0) == 0.0
    assert g.total_mass == pytest.approx(1.0)
    assert density_integral(g, (0.0, 2.0)) == pytest.approx(1.0)
    assert density_integral(g, (0.5, 1.5)) == pytest.approx(0.75)


def test_quasi_measure_from_special_boole():
    qs = quasi_measure_from_fixed_point(SpecialBoole(0.5, 0.0, 0.0, 0.5))
    live = [q for q in qs if not q.degenerate]
    assert len(live) == 1
    q = live[0]
    assert q.omega == pytest.approx(1j)
    ref = CauchyDensity(0.0, 1.0)
    for x in np.linspace(-20, 20, 41):
        assert q(float(x)) == pytest.approx(ref(float(x)), rel=1e-12)


def test_quasi_measure_matches_alpha_beta_family():
    # phi(y) = alpha y - beta / y: fixed point i*sqrt(beta/(1-alpha)) gives
    # exactly the alpha-beta density
    rng = np.random.default_rng(5)
    for _ in range(20):
        alpha = float(rng.uniform(0.05, 0.95))
        beta = float(rng.uniform(0.2, 3.0))
        m = BooleMap1D(alpha, 0.0, (beta,), (0.0,))
        live = [q for q in quasi_measure_from_fixed_point(m) if not q.degenerate]
        assert len(live) == 1
        assert live[0].omega == pytest.approx(1j * math.sqrt(beta / (1.0 - alpha)))
        ref = AlphaBetaDensity(alpha, beta)
        for x in np.linspace(-100, 100, 21):
            assert live[0](float(x)) == pytest.approx(ref(float(x)), abs=1e-12)


def test_degenerate_quasi_measure_for_dissipative_map():
    qs = quasi_measure_from_fixed_point(BooleMap1D(1.0, 1.0, (1.0,), (0.0,)))
    assert len(qs) == 1
    assert qs[0].degenerate
    assert qs[0](0.3) == 0.0
    assert density_integral(qs[0], (-math.inf, math.inf)) == 0.0


def test_quasi_measures_are_probability_densities():
    m = BooleMap1D(0.6, 0.4, (1.0, 0.7), (-1.0, 2.0))
    for q in quasi_measure_from_fixed_point(m):
        if q.degenerate:
            continue
        assert density_integral(q, (-math.inf, math.inf)) == pytest.approx(1.0, abs=1e-12)
        assert all(q(float(x)) >= 0.0 for x in np.linspace(-50, 50, 101))


def test_quasi_measures_pass_invariance_check():
    maps = [
        SpecialBoole(0.5, 1.0, 2.0, 2.0),
        BooleMap1D(0.3, 0.0, (1.0,), (0.0,)),
        BooleMap1D(0.6, 0.4, (1.0, 0.7), (-1.0, 2.0)),
    ]
    grid = np.linspace(-40, 40, 400)
    for m in maps:
        live = [q for q in quasi_measure_from_fixed_point(m) if not q.degenerate]
        assert live
        for q in live:
            rep = verify_invariant_density(m, q, grid, 1e-8)
            assert rep.passed, (m, q.omega, rep.max_rel_residual)


def test_classify_ergodicity():
    assert classify_ergodicity(ClassicalBoole()) is ErgodicityClass.INFINITE_ERGODIC_LEBESGUE
    assert classify_ergodicity(BooleMap1D(1.0, 1.0, (1.0,), (0.0,))) is ErgodicityClass.TOTALLY_DISSIPATIVE
    assert classify_ergodicity(BooleMap1D(0.3, 0.0, (1.0,), (0.0,))) is ErgodicityClass.FINITE_ERGODIC
    assert classify_ergodicity(BooleMap1D(1.0, 0.0, (1.0, 1.0), (-1.0, 1.0))) is ErgodicityClass.INFINITE_ERGODIC_LEBESGUE


def test_classification_consistent_with_upper_fixed_points():
    rng = np.random.default_rng(17)
    for _ in range(40):
        n = int(rng.integers(1, 4))
        bs = np.sort(rng.uniform(-3, 3, n))
        while np.any(np.diff(bs) < 0.5):
            bs = np.sort(rng.uniform(-3, 3, n))
        alpha = float(rng.choice([0.3, 0.8, 1.3, 2.0]))
        m = BooleMap1D(alpha, float(rng.uniform(-2, 2)), tuple(rng.uniform(0.3, 2.0, n)), tuple(bs))
        cls = classify_ergodicity(m)
        has_upper = bool(complex_fixed_points(m).upper)
        if cls is ErgodicityClass.FINITE_ERGODIC:
            assert has_upper
        elif cls is ErgodicityClass.DEGENERATE:
            assert not has_upper


def test_alpha_beta_equals_poisson_kernel_form():
    rng = np.random.default_rng(9)
    for _ in range(20):
        alpha = float(rng.uniform(0.05, 0.95))
        beta = float(rng.uniform(0.1, 4.0))
        d = AlphaBetaDensity(alpha, beta)
        v = d.half_width
        for x in np.linspace(-100, 100, 41):
            poisson = v / (math.pi * (x * x + v * v))
            assert d(float(x)) == pytest.approx(poisson, abs=1e-12)


def test_density_serialization_roundtrip():
    densities = [
        CauchyDensity(1.5, 0.7),
        AlphaBetaDensity(0.4, 2.0),
        GaussDensity(),
        LebesgueUnit(),
        QuasiMeasureDensity(omega=1.0 + 2.0j),
        GridDensity((0.0, 0.5, 1.0), (0.5, 2.0, 0.5)),
    ]
    for d in densities:
        assert density_from_dict(d.to_dict()) == d
