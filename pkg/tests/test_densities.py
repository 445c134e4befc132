"""Majorants with growth certificates, density families, and the curve
modulus of continuity."""

import math

import numpy as np
import pytest

import curvepot as cp


# -- majorants ------------------------------------------------------------


def test_power_majorants_certified():
    for alpha in (0.25, 0.5, 1.0):
        mu = cp.make_majorant("power", alpha=alpha)
        assert mu.sigma == 1.0
        assert mu.k == 1.0
        assert mu.vanishes_at_zero()


def test_powerlog_majorant():
    mu = cp.make_majorant("powerlog")
    assert mu(0.5) == pytest.approx(0.5 * math.log(8.0 * math.e), rel=1e-12)
    assert mu.vanishes_at_zero()


def test_majorant_is_nondecreasing_on_grid():
    mu = cp.make_majorant("powerlog")
    etas = 2.0 ** -np.arange(20, -1, -1.0)
    vals = mu(etas)
    assert np.all(np.diff(vals) >= 0)


def _quadratic_table(sigma, k):
    etas = (2.0 ** -np.arange(17.0))[::-1]
    return cp.make_majorant("table", etas=etas, values=etas ** 2,
                            sigma=sigma, k=k)


def test_quadratic_rejected_as_class_one():
    with pytest.raises(cp.MajorantError):
        _quadratic_table(1.0, 1.0)


def test_table_majorant_accepted_with_matching_class():
    mu = _quadratic_table(2.0, 2.0)
    assert mu.k == 2.0
    assert mu.vanishes_at_zero()


def test_majorant_rejects_nonpositive_eta():
    mu = cp.make_majorant("power", alpha=0.5)
    with pytest.raises(cp.MajorantError):
        mu(0.0)
    with pytest.raises(cp.MajorantError):
        mu(-1.0)


def test_ratio_check_linear_and_sqrt():
    assert cp.majorant_ratio_check(cp.make_majorant("power", alpha=1.0),
                                   0.01, 0.04)
    assert cp.majorant_ratio_check(cp.make_majorant("power", alpha=0.5),
                                   0.01, 0.04)


def test_ratio_check_needs_class_one():
    with pytest.raises(cp.MajorantError):
        cp.majorant_ratio_check(_quadratic_table(2.0, 2.0), 0.01, 0.04)


def test_certificate_residual_flags_violation():
    # worst pairwise growth ratio; at most one for a certified table
    etas = np.array([0.01, 0.1, 1.0])
    assert cp.normal_certificate_residual(etas, etas ** 2, 1.0, 1.0) > 1.0
    assert cp.normal_certificate_residual(etas, etas, 1.0, 1.0) <= 1.0 + 1e-12


# -- density families -----------------------------------------------------


def test_const_density(circle512):
    g = cp.const_density(2.5)
    assert g(0j) == 2.5
    assert np.all(g.sample_values(circle512) == 2.5)


def test_re_density_values():
    g = cp.re_density()
    assert g(1.0 + 2.0j) == 1.0
    assert np.allclose(g.values_at(np.array([1j, 2.0 + 1j])), [0.0, 2.0])


def test_holder_density_basics():
    g = cp.holder_density(0j, 0.5)
    assert g(0j) == 0.0
    assert g(-1.0 + 1.0j) == pytest.approx(2.0 ** 0.25, rel=1e-12)
    with pytest.raises(cp.DensitySpecError):
        cp.holder_density(0j, 1.5)
    with pytest.raises(cp.DensitySpecError):
        cp.holder_density(0j, 0.0)


def test_holder_modulus_bounded_by_eps(circle512):
    g = cp.holder_density(0j, 1.0)
    for eps in (0.125, 0.25, 0.5):
        # reverse triangle inequality makes the slope at most one
        assert cp.modulus_of_continuity(g, circle512, eps) <= eps + 1e-9
    assert abs(cp.modulus_of_continuity(g, circle512, 0.5) - 0.5) < 0.01


# -- extremal density -----------------------------------------------------


def test_extremal_density_closed_form_at_minus_two(g3):
    # radial kernel reduces to 32*eta^2/(4-eta^2)^2 there; integrate via
    # the antiderivative x/(8(4-x^2)) + ln((2+x)/(2-x))/32
    exact = 32.0 * (1.0 / 6.0 - math.log(3.0) / 8.0)
    assert abs(g3(-2.0) - exact) < 1e-4


def test_extremal_density_vanishes_at_zero(g3):
    assert g3(0j) == 0.0
    assert abs(g3(complex(-1.0 + np.exp(1e-3 * 1j)))) < 0.01
    assert abs(g3(complex(-1.0 + np.exp(1e-4 * 1j)))) < 0.01


def test_extremal_density_conjugation_symmetry(g3):
    ts = -1.0 + np.exp(1j * np.linspace(0.05, 3.1, 40))
    sym = np.abs(g3.values_at(ts) - g3.values_at(np.conj(ts)))
    assert np.max(sym) <= 1e-8


def test_extremal_density_scalar_matches_batch(g3):
    ts = -1.0 + np.exp(1j * np.array([0.3, 1.0, 2.2, 4.4]))
    batch = g3.values_at(ts)
    single = [g3(t) for t in ts]
    assert np.allclose(batch, single, rtol=0, atol=1e-13)


def test_extremal_density_finite_on_curve(circle1024, g3):
    vals = g3.sample_values(circle1024)
    assert np.all(np.isfinite(vals))


def test_extremal_density_rejects_interior_real_points(g3):
    # the radial kernel degenerates on the open real segment (0, 1)
    with pytest.raises(ValueError):
        g3(0.5)


def test_extremal_density_requires_class_one_vanishing():
    with pytest.raises(cp.MajorantError):
        cp.theorem3_density(_quadratic_table(2.0, 2.0))
    etas = (2.0 ** -np.arange(17.0))[::-1]
    flat = cp.make_majorant("table", etas=etas, values=np.ones_like(etas),
                            sigma=1.0, k=1.0)
    with pytest.raises(cp.MajorantError):
        cp.theorem3_density(flat)


def test_extremal_density_modulus_tracks_majorant(circle1024, g3, mu_id):
    eps_grid = [0.25, 0.125, 0.0625, 0.03125, 0.015625]
    ratios = [cp.modulus_of_continuity(g3, circle1024, e) / mu_id(e)
              for e in eps_grid]
    assert max(ratios) / min(ratios) <= 10.0


# -- the curve modulus ----------------------------------------------------


def test_modulus_constant_is_zero(circle512):
    assert cp.modulus_of_continuity(cp.const_density(7.0), circle512, 0.3) == 0.0


def test_modulus_re_matches_chord_extremum(circle512, re_g):
    # horizontal chords realize the sup, giving omega(eps) = eps
    for eps in (0.25, 0.5, 1.0, 2.0):
        got = cp.modulus_of_continuity(re_g, circle512, eps)
        assert abs(got - eps) < 0.01


def test_modulus_nondecreasing_and_doubling(circle512, holder_half):
    grid = [0.0625, 0.125, 0.25, 0.5, 1.0]
    vals = cp.modulus_table(holder_half, circle512, grid)
    assert np.all(np.diff(vals) >= -1e-12)
    for eps, val in zip(grid[:-1], vals):
        big = cp.modulus_of_continuity(holder_half, circle512, 2.0 * eps)
        assert big <= 2.0 * val * 1.05 + 1e-9


def test_measured_modulus_is_class_two_one_majorant(circle512):
    # doubling the scale at most doubles the measured modulus, up to
    # sampling slack
    for g in (cp.re_density(), cp.holder_density(0j, 0.5)):
        grid = 2.0 ** -np.arange(1, 6.0)
        vals = np.array([cp.modulus_of_continuity(g, circle512, e)
                         for e in grid])
        res = cp.normal_certificate_residual(grid[::-1], vals[::-1], 2.0, 1.0)
        assert res <= 1.05
