import math

import numpy as np
import pytest
from scipy.integrate import quad

from srge.core_types import Geometry, ModelParams, ModulatedPolynomial
from srge.moments_n1 import f1_chiral, f1_excited_diagonal
from srge.moments_n2 import f2_chiral
from srge.core_types import BosonState
from srge.resolved import (
    ApproximationDomainError,
    ChargeDistribution,
    OddPowerError,
    charge_distribution,
    delta_s2_excited,
    delta_s2_numeric,
    extract_coefficients,
    gaussian_charge_distribution,
    ground_charged_moment,
    modulated_gaussian_fourier,
    prel_series,
    relative_fourier,
    s2_compact,
    s2_series,
)

P1 = ModelParams(1.0)


def _quad_fourier(p, var, q):
    sd = math.sqrt(var)

    def f(t, part):
        z = np.exp(-1j * t * q) * p(t) * np.exp(-t * t / (2 * var)) / (2 * math.pi)
        return z.real if part == 0 else z.imag

    lim = 40 * sd
    re = quad(f, -lim, lim, args=(0,), limit=400, epsabs=1e-13, epsrel=1e-12)[0]
    im = quad(f, -lim, lim, args=(1,), limit=400, epsabs=1e-13, epsrel=1e-12)[0]
    return re + 1j * im


@pytest.mark.parametrize("seed", range(6))
def test_fourier_matches_quadrature(seed):
    rng = np.random.default_rng(seed)
    deg = 8
    c = np.zeros(deg + 1, dtype=complex)
    c[::2] = rng.normal(size=deg // 2 + 1)
    p = ModulatedPolynomial(0.0, c)
    var = rng.uniform(0.05, 0.6)
    for q in (0.0, 0.7, -2.0):
        assert modulated_gaussian_fourier(p, var, q) == pytest.approx(_quad_fourier(p, var, q), abs=1e-9)


def test_fourier_with_phase_and_odd_powers():
    p = ModulatedPolynomial(0.35, [0.5, 0.2j, -0.1, 0.03j])
    for q in (-1.0, 0.0, 1.3):
        assert modulated_gaussian_fourier(p, 0.3, q) == pytest.approx(_quad_fourier(p, 0.3, q), abs=1e-9)


def test_fourier_phase_is_translation():
    p = ModulatedPolynomial(0.0, [1.0, 0, -0.4])
    shifted = ModulatedPolynomial(0.6, p.coeffs)
    q = np.linspace(-3, 3, 13)
    assert np.allclose(modulated_gaussian_fourier(shifted, 0.2, q + 0.6), modulated_gaussian_fourier(p, 0.2, q))
    with pytest.raises(ValueError):
        modulated_gaussian_fourier(p, 0.0, 0.0)


def test_ground_moment():
    g = ground_charged_moment(P1, Geometry.from_log_cutoff(0.5, math.pi**2), 1)
    assert g(0.0) == 1.0
    assert g(1.0) == pytest.approx(0.60653, abs=5e-6)
    g2 = ground_charged_moment(ModelParams(0.8), Geometry.from_log_cutoff(0.5, 12.0), 2)
    assert g2.theta_variance == pytest.approx(math.pi**2 * 2 / (0.64 * 12.0))
    assert g2.charge_variance * g2.theta_variance == pytest.approx(1.0)


def test_extract_coefficients():
    p = ModulatedPolynomial(0.0, [2.0, 0, 0.5, 0, 0.25])
    c = extract_coefficients(p, 0.5)
    assert (c.c0, c.c2, c.c4) == (2.0, 2.0, 4.0)
    with pytest.raises(OddPowerError):
        extract_coefficients(ModulatedPolynomial(0.0, [1, 1e-6]), 1.0)
    with pytest.raises(OddPowerError):
        extract_coefficients(ModulatedPolynomial(0.1, [1.0]), 1.0)


def test_prel_series_examples():
    g = Geometry.from_log_cutoff(0.4, 10.0)
    assert prel_series(0.0, 0.0, P1, g, 3) == 1.0
    assert prel_series(1.0, 0.0, P1, g, 0) == pytest.approx(1.98696, abs=5e-6)
    d = prel_series(1.0, 0.0, P1, g, 2) - prel_series(1.0, 0.0, P1, g, 0)
    assert d == pytest.approx(-4 * math.pi**4 / 100)


def test_prel_series_exact_for_quadratic_moment():
    r = 0.3
    f1 = f1_chiral(P1, r, (1,), (1,), 0.0)
    c = extract_coefficients(f1, 1.0)
    g = Geometry.from_log_cutoff(r, 25.0)
    for q in (0.0, 1.0, -2.0):
        assert relative_fourier(f1, P1, g, q).real == pytest.approx(prel_series(c.c2.real, 0.0, P1, g, q), abs=1e-12)


def test_prel_series_tracks_exact_transform():
    r = 0.3
    f1 = f1_chiral(P1, r, (1, 1), (1, 1), 0.0)
    c = extract_coefficients(f1, 1.0)
    errs = []
    for lg in (160.0, 320.0):
        g = Geometry.from_log_cutoff(r, lg)
        exact = relative_fourier(f1, P1, g, 1.0).real
        errs.append(abs(exact - prel_series(c.c2.real, c.c4.real, P1, g, 1.0)))
    assert errs[1] < errs[0] / 6


def test_gaussian_distribution():
    g = Geometry.from_log_cutoff(0.4, 15.0)
    q = np.arange(-8, 9)
    d = gaussian_charge_distribution(0.0, P1, g, q)
    assert d.total() == pytest.approx(1.0, abs=1e-8)
    assert np.allclose(d.values, d.values[::-1])
    w = np.exp(-math.pi**2 * q**2 / (2 * 15.0))
    assert np.allclose(d.values, w / w.sum())
    shifted = gaussian_charge_distribution(0.0, P1, g, np.arange(-10, 11), phase_rate=0.8)
    assert shifted.mean() == pytest.approx(0.8, abs=1e-6)
    with pytest.raises(ApproximationDomainError):
        gaussian_charge_distribution(1.0, P1, Geometry.from_log_cutoff(0.4, 5.0), q)


@pytest.mark.parametrize("m", [-2, -1, 0, 1, 2])
@pytest.mark.parametrize("r", [0.25, 0.5])
def test_winding_shifts_mean(m, r):
    p = f1_excited_diagonal(P1, r, BosonState((), (), 0, m))
    g = Geometry.from_log_cutoff(r, 20.0)
    d = charge_distribution(p, P1, g, np.arange(-30, 31))
    assert d.total() == pytest.approx(1.0, abs=1e-8)
    assert d.mean() == pytest.approx(r * m, abs=1e-6)


def test_distribution_kinds():
    with pytest.raises(ValueError):
        ChargeDistribution([0], [1.0], "other")
    p = f1_chiral(P1, 0.3, (1,), (1,), 0.0)
    g = Geometry.from_log_cutoff(0.3, 20.0)
    rel = charge_distribution(p, P1, g, np.arange(-3, 4), kind="ground_relative")
    assert np.allclose(rel.values, relative_fourier(p, P1, g, np.arange(-3, 4)).real)


def test_s2_series_examples():
    g = Geometry.from_log_cutoff(0.3, 12.0)
    assert s2_series(1.0, 0.0, 0.0, P1, g, 2) == 0.0
    assert s2_series(0.5625, 0.0, 0.0, P1, g, 1) == pytest.approx(0.57536, abs=5e-6)
    d = s2_series(1.0, 0.3, 0.0, P1, g, 1) - s2_series(1.0, 0.3, 0.0, P1, g, 0)
    assert d == pytest.approx(4 * 0.3 * math.pi**4 / 144)
    with pytest.raises(ValueError):
        s2_series(0.0, 0, 0, P1, g, 0)


def test_delta_s2_ground_and_leading_term():
    g = Geometry.from_log_cutoff(0.3, 12.0)
    assert delta_s2_excited(1.0, 0, 0, 0, 0, P1, g, 3) == 0.0
    big = Geometry.from_log_cutoff(0.3, 600.0)
    first = (delta_s2_excited(0.4, 0.1, 0.02, -0.2, 0.01, P1, big, 0) + math.log(0.4)) * 600.0
    assert first == pytest.approx(2 * (-0.2 - 0.25) * math.pi**2, rel=0.02)


def _level1_coeffs(r):
    f1 = f1_chiral(P1, r, (1,), (1,), 0.0)
    f2 = f2_chiral(P1, r, [(1,)] * 4)
    return f1, f2, extract_coefficients(f1, 1.0), extract_coefficients(f2, 1.0)


@pytest.mark.parametrize("r", [0.25, 0.5])
def test_delta_s2_series_tracks_exact_transform(r):
    f1, f2, h, f = _level1_coeffs(r)
    errs = []
    for lg in (160.0, 320.0):
        g = Geometry.from_log_cutoff(r, lg)
        ser = delta_s2_excited(f.c0.real, f.c2.real, f.c4.real, h.c2.real, h.c4.real, P1, g, 1.0)
        errs.append(abs(delta_s2_numeric(f2, f1, P1, g, 1.0).real - ser))
    assert errs[1] < errs[0] / 6


def test_compact_matches_series_difference_to_second_order():
    rng = np.random.default_rng(3)
    for _ in range(5):
        f0 = rng.uniform(0.3, 1.0)
        f2, h2 = rng.uniform(-0.2, 0.2, size=2)
        gaps = []
        for lg in (100.0, 200.0, 400.0):
            g = Geometry.from_log_cutoff(0.4, lg)
            comp = s2_compact(f0, f2, h2, P1, g, 0.0) - s2_compact(1.0, 0.0, 0.0, P1, g, 0.0)
            ser = delta_s2_excited(f0, f2, 0.0, h2, 0.0, P1, g, 0.0)
            gaps.append(abs(comp - ser) * lg**2)
        assert gaps[2] < 1.5 * gaps[0] + 1e-6


def test_compact_q_term_has_opposite_sign_to_series():
    # the compact form's q^2 coefficient is kept as reference; the series
    # and the exact transform agree with each other and not with it
    f1, f2, h, f = _level1_coeffs(0.3)
    g = Geometry.from_log_cutoff(0.3, 200.0)
    args = (f.c0.real, f.c2.real, h.c2.real, P1, g)
    comp = s2_compact(*args, 1.0) - s2_compact(*args, 0.0)
    ser = (delta_s2_excited(f.c0.real, f.c2.real, f.c4.real, h.c2.real, h.c4.real, P1, g, 1.0)
           - delta_s2_excited(f.c0.real, f.c2.real, f.c4.real, h.c2.real, h.c4.real, P1, g, 0.0))
    exact = (delta_s2_numeric(f2, f1, P1, g, 1.0) - delta_s2_numeric(f2, f1, P1, g, 0.0)).real
    assert exact == pytest.approx(ser, rel=0.02)
    assert np.sign(comp) == -np.sign(ser)


def test_compact_domain_and_reduction():
    g = Geometry.from_log_cutoff(0.3, 20.0)
    base = s2_compact(1.0, 0.0, 0.0, P1, g, 0.0)
    assert base == pytest.approx(5.0 - 0.5 * math.log(20.0) - math.log(2 / math.sqrt(math.pi)))
    assert s2_compact(1.0, 0.0, 0.0, P1, g, 0.0, g_a=2.0) == pytest.approx(base + 2 * math.log(2.0))
    with pytest.raises(ApproximationDomainError):
        s2_compact(1.0, -1.0, 0.0, P1, Geometry.from_log_cutoff(0.3, 3.0), 0.0)
