"""Bound functionals, closure grids, solid moduli, and report assembly."""

import math

import numpy as np
import pytest

import curvepot as cp
from curvepot.bounds import (OmegaTable, TableCoverageError, build_closure_grid,
                             closure_field_values, head_integral,
                             solid_modulus, tail_integral)
from curvepot.potentials import PotentialField


def _omega_identity():
    return OmegaTable.from_function(lambda e: e, 1e-6, 4.0)


def _omega_sqrt():
    return OmegaTable.from_function(math.sqrt, 1e-6, 4.0)


# -- integral functionals -------------------------------------------------


def test_tail_integral_identity_weight_is_exact():
    # omega(eta) = eta makes the integrand 1/eta, constant in log eta
    table = _omega_identity()
    assert tail_integral(table, 0.25, 4.0) == pytest.approx(math.log(16.0),
                                                            abs=1e-10)


def test_tail_integral_argument_checks():
    table = _omega_identity()
    with pytest.raises(ValueError):
        tail_integral(table, -0.1, 1.0)
    with pytest.raises(ValueError):
        tail_integral(table, 0.5, 0.5)
    with pytest.raises(TableCoverageError):
        tail_integral(table, 0.25, 8.0)


def test_bound_thm2_closed_forms():
    # eps * integral of omega/eta^2 over [eps, 2d] at eps=0.25, d=2
    assert cp.bound_thm2(_omega_identity(), 0.25, 2.0) == pytest.approx(
        0.25 * math.log(16.0), abs=1e-3)
    assert cp.bound_thm2(_omega_sqrt(), 0.25, 2.0) == pytest.approx(0.75,
                                                                    abs=1e-3)


def test_bound_zygmund_closed_forms():
    # adds the head integral 2*sqrt(eps) resp. eps on top of the tail
    assert cp.bound_zygmund(_omega_sqrt(), 0.25, 2.0) == pytest.approx(1.75,
                                                                       abs=1e-3)
    assert cp.bound_zygmund(_omega_identity(), 0.25, 2.0) == pytest.approx(
        0.25 + 0.25 * math.log(16.0), abs=1e-3)


def test_bound_thm1_is_tail_plus_oscillation():
    table = _omega_sqrt()
    t2 = cp.bound_thm2(table, 0.25, 2.0)
    assert cp.bound_thm1(table, 0.125, 0.25, 2.0) == t2 + 0.125


def test_head_integral_of_power_fit_extension():
    # measured sqrt table: the power fit carries the integral below the grid
    etas = np.geomspace(1e-4, 1.0, 200)
    table = OmegaTable.from_measured(etas, np.sqrt(etas))
    assert head_integral(table, 0.25) == pytest.approx(1.0, rel=2e-3)


def test_head_integral_flat_measured_table_raises():
    etas = np.geomspace(1e-4, 1.0, 50)
    table = OmegaTable.from_measured(etas, np.full(50, 0.3))
    with pytest.raises(ValueError):
        head_integral(table, 0.5)


def test_head_integral_zero_table():
    etas = np.geomspace(1e-4, 1.0, 50)
    table = OmegaTable.from_measured(etas, np.zeros(50))
    assert head_integral(table, 0.5) == 0.0


def test_dini_integral_powers():
    assert float(cp.dini_integral(lambda e: e, 1.0)) == pytest.approx(1.0,
                                                                      abs=1e-3)
    assert float(cp.dini_integral(lambda e: e ** 0.5, 1.0)) == pytest.approx(
        2.0, abs=1e-3)
    assert float(cp.dini_integral(lambda e: e ** 0.25, 1.0)) == pytest.approx(
        4.0, abs=1e-3)
    assert not cp.dini_integral(lambda e: e, 1.0).diverged


def test_dini_integral_log_modulus_diverges():
    res = cp.dini_integral(lambda e: 1.0 / math.log(math.e / e), 1.0)
    assert res.diverged
    assert np.isfinite(res.value)


def test_dini_integral_bad_upper():
    with pytest.raises(ValueError):
        cp.dini_integral(lambda e: e, 0.0)


# -- omega tables ---------------------------------------------------------


def test_omega_table_rejects_bad_input():
    with pytest.raises(ValueError):
        OmegaTable([0.1, 0.2], [1.0, 0.5])          # decreasing values
    with pytest.raises(ValueError):
        OmegaTable([0.2, 0.1], [0.5, 1.0])          # decreasing etas
    with pytest.raises(ValueError):
        OmegaTable([0.1, 0.2], [-0.1, 0.5])         # negative value
    with pytest.raises(ValueError):
        OmegaTable([0.1], [0.5])                    # too short


def test_omega_table_coverage():
    table = _omega_identity()
    assert table.covers(1e-6, 4.0)
    assert not table.covers(1e-7, 4.0)
    assert not table.covers(1e-6, 5.0)
    with pytest.raises(TableCoverageError):
        table(8.0)


def test_omega_table_interpolates_and_extends():
    etas = np.geomspace(1e-3, 1.0, 120)
    table = OmegaTable.from_measured(etas, np.sqrt(etas))
    assert table(0.49) == pytest.approx(0.7, rel=1e-3)
    # below the grid the fitted power law takes over
    assert table(1e-5) == pytest.approx(math.sqrt(1e-5), rel=0.05)


# -- closure grids and solid moduli ---------------------------------------


@pytest.fixture(scope="module")
def circle128():
    return cp.build_curve("circle:center=-1,radius=1", n_samples=128)


def test_closure_grid_shape_and_validate(circle128):
    for side in ("plus", "minus"):
        grid = build_closure_grid(circle128, side)
        assert grid.validate(circle128) == []
        assert int(grid.is_boundary.sum()) == 128
        assert len(grid) > 128
        assert grid.r_out == pytest.approx(4.0)
    with pytest.raises(ValueError):
        build_closure_grid(circle128, "inside")


def test_closure_field_side_mismatch(circle128):
    grid = build_closure_grid(circle128, "plus")
    fld = PotentialField(circle128, cp.const_density(1.0), "minus")
    with pytest.raises(ValueError):
        closure_field_values(fld, grid)


def test_solid_modulus_constant_density_vanishes(circle128):
    grid = build_closure_grid(circle128, "plus")
    fld = PotentialField(circle128, cp.const_density(1.0), "plus")
    assert solid_modulus(fld, grid, 0.2) < 1e-7


def test_solid_modulus_linear_field(circle128):
    # u = (Re z - 1)/2 on the enclosed side, so the modulus is eps/2
    grid = build_closure_grid(circle128, "plus")
    fld = PotentialField(circle128, cp.re_density(), "plus")
    assert solid_modulus(fld, grid, 0.2) == pytest.approx(0.1, abs=0.02)


def test_solid_modulus_eps_below_grid_resolution(circle128):
    grid = build_closure_grid(circle128, "plus")
    fld = PotentialField(circle128, cp.const_density(1.0), "plus")
    with pytest.raises(ValueError):
        solid_modulus(fld, grid, 1e-9)
    with pytest.raises(ValueError):
        solid_modulus(fld, grid, -0.1)


# -- report assembly ------------------------------------------------------


@pytest.fixture(scope="module")
def re_report(circle128):
    return cp.build_bound_report(circle128, cp.re_density(),
                                 [0.05, 0.1, 0.2, 0.3], sides="both")


def test_report_passes_own_validation(re_report):
    assert re_report.validate() == []


def test_report_column_relations(re_report):
    np.testing.assert_allclose(re_report.bound_thm1,
                               re_report.bound_thm2 + re_report.m_gamma,
                               rtol=0, atol=1e-12)
    assert np.all(np.diff(re_report.omega_curve) >= -1e-12)
    assert np.all(re_report.bound_thm2 > 0)
    assert np.all(re_report.bound_zygmund >= re_report.bound_thm2)


def test_report_flags_large_eps(re_report):
    # d = 2 for this circle; eps beyond d/8 gets flagged
    assert list(re_report.out_of_range) == [0, 0, 0, 1]
    assert re_report.d == pytest.approx(2.0)


def test_report_solid_tracks_linear_field(re_report):
    np.testing.assert_allclose(re_report.omega_solid_plus,
                               re_report.eps / 2.0, rtol=0.12)


def test_report_without_majorant_has_zero_lower_ratio(re_report):
    assert np.all(re_report.ratio_lower == 0)
    assert re_report.mu_label is None
    assert not re_report.dini_diverged


def test_report_rows_match_columns(re_report):
    rows = list(re_report.rows())
    assert len(rows) == 4
    assert len(rows[0]) == 12
    assert rows[2][0] == pytest.approx(0.2)
    assert rows[2][5] == pytest.approx(re_report.bound_thm1[2])


def test_report_rejects_bad_input(circle128):
    with pytest.raises(ValueError):
        cp.build_bound_report(circle128, cp.re_density(), [])
    with pytest.raises(ValueError):
        cp.build_bound_report(circle128, cp.re_density(), [0.1],
                              sides=("outside",))


def test_sharpness_denominators_match_closed_forms():
    # eps * integral of mu/eta^2 over [eps, 4]; both are exact in log space
    mu_id = cp.make_majorant("power", alpha=1.0)
    mu_log = cp.make_majorant("powerlog")
    for eps in (0.05, 0.1, 0.2):
        t_id = OmegaTable.from_function(mu_id, eps / 4.0, 4.0)
        assert eps * tail_integral(t_id, eps, 4.0) == pytest.approx(
            eps * math.log(4.0 / eps), rel=1e-9)
        t_log = OmegaTable.from_function(mu_log, eps / 4.0, 4.0)
        expected = eps * (math.log(4.0 * math.e / eps) ** 2 - 1.0) / 2.0
        assert eps * tail_integral(t_log, eps, 4.0) == pytest.approx(expected,
                                                                     rel=1e-6)


def test_sharpness_ratios_degenerate_for_constant_density(circle128):
    report = cp.build_bound_report(circle128, cp.const_density(2.0),
                                   [0.1, 0.2], sides="plus")
    result = cp.sharpness_ratios(report, cp.make_majorant("power", alpha=1.0))
    assert result.max_lower < 1e-6
    assert np.all(result.ratio_upper == 0)
