"""End-to-end acceptance sweep.

One test per numbered criterion; each prints a summary line with its
measured quantities so a verbose run reads as a checklist.
"""

import math
import time

import numpy as np
import pytest

import curvepot as cp
from curvepot.argbranch import arg_variation
from curvepot.bounds import OmegaTable, tail_integral
from curvepot.curves import ahlfors_report, kral_integral

REFERENCE = "circle:center=-1,radius=1"


def _emit(num: int, ok: bool, detail: str):
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} - {detail}")


def _signed_points(curve, rng, n_per_side, min_dist):
    """n_per_side off-curve points inside and outside, away from the curve."""
    pts = curve.points
    lo = complex(pts.real.min() - 1.0, pts.imag.min() - 1.0)
    hi = complex(pts.real.max() + 1.0, pts.imag.max() + 1.0)
    inside, outside = [], []
    while len(inside) < n_per_side or len(outside) < n_per_side:
        z = complex(rng.uniform(lo.real, hi.real), rng.uniform(lo.imag, hi.imag))
        if curve.distance_to_samples(z) < min_dist:
            continue
        bucket = inside if cp.winding_number(curve, z) != 0 else outside
        if len(bucket) < n_per_side:
            bucket.append(z)
    return inside, outside


def test_criterion_1_jump_relation(circle512, re_g, holder_half, g3):
    start = time.time()
    densities = [cp.const_density(1.0), re_g, holder_half, g3]
    idx = (np.arange(256) * circle512.n_samples) // 256
    worst = 0.0
    for g in densities:
        for i in idx:
            xi = complex(circle512.points[i])
            plus = cp.boundary_value(circle512, g, xi, "plus")
            minus = cp.boundary_value(circle512, g, xi, "minus")
            worst = max(worst, abs(plus - minus - g(xi)))
    wall = time.time() - start
    ok = worst <= 1e-8 and wall < 30.0
    _emit(1, ok, f"jump residual max {worst:.3e} over 256 base points x "
                 f"{len(densities)} densities in {wall:.1f}s")
    assert worst <= 1e-8
    assert wall < 30.0


def test_criterion_2_analytic_field_oracle(circle512, re_g):
    rng = np.random.default_rng(11)
    inside, outside = _signed_points(circle512, rng, 100, 0.05)
    worst_field = 0.0
    for z in inside:
        exact = (z.real - 1.0) / 2.0
        got = cp.cauchy_integral(circle512, re_g, z, tol=1e-8).real
        worst_field = max(worst_field, abs(got - exact))
    for z in outside:
        exact = (-1.0 / (2.0 * (z + 1.0))).real
        got = cp.cauchy_integral(circle512, re_g, z, tol=1e-8).real
        worst_field = max(worst_field, abs(got - exact))
    worst_boundary = 0.0
    for i in range(0, 512, 8):
        xi = complex(circle512.points[i])
        got = cp.boundary_value(circle512, re_g, xi, "plus")
        worst_boundary = max(worst_boundary, abs(got - (xi.real - 1.0) / 2.0))
    ok = worst_field <= 1e-6 and worst_boundary <= 1e-3
    _emit(2, ok, f"field error max {worst_field:.3e} at 200 points, "
                 f"boundary error max {worst_boundary:.3e}")
    assert worst_field <= 1e-6
    assert worst_boundary <= 1e-3


def test_criterion_3_geometry_oracles(square512):
    unit = cp.build_curve("circle:center=0,radius=1", n_samples=4096)
    eps = np.array([0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0])
    theta = ahlfors_report(unit, eps)[:, 1]
    arc_err = float(np.max(np.abs(theta - 4.0 * np.arcsin(eps / 2.0))))

    circle = cp.build_curve("circle:center=0,radius=1", n_samples=512)
    var_err = 0.0
    for i in range(circle.n_samples):
        v = arg_variation(circle, complex(circle.points[i]))
        var_err = max(var_err, abs(v - math.pi))
    v_vertex = arg_variation(square512, complex(square512.points[0]))
    vertex_err = abs(v_vertex - math.pi / 2.0)

    worst_res = 0.0
    for curve in (circle, square512):
        for i in range(curve.n_samples):
            xi = complex(curve.points[i])
            kv = kral_integral(curve, xi, 720)
            av = arg_variation(curve, xi)
            worst_res = max(worst_res, abs(kv - av) / av)
    # spot check at four times the resolution
    fine = cp.build_curve("circle:center=0,radius=1", n_samples=4096)
    for i in range(0, 4096, 128):
        xi = complex(fine.points[i])
        kv = kral_integral(fine, xi, 720)
        av = arg_variation(fine, xi)
        worst_res = max(worst_res, abs(kv - av) / av)

    ok = (arc_err <= 1e-3 and var_err <= 0.01 and vertex_err <= 0.01
          and worst_res <= 0.02)
    _emit(3, ok, f"arc-measure err {arc_err:.2e}, variation err {var_err:.2e} "
                 f"(circle) / {vertex_err:.2e} (square vertex), indicatrix "
                 f"residual max {worst_res:.3%}")
    assert arc_err <= 1e-3
    assert var_err <= 0.01
    assert vertex_err <= 0.01
    assert worst_res <= 0.02


def test_criterion_4_dual_route_agreement(circle512, ellipse512, re_g,
                                          holder_half):
    rng = np.random.default_rng(23)
    worst = 0.0
    for curve, g in ((circle512, re_g), (ellipse512, holder_half)):
        inside, outside = _signed_points(curve, rng, 100, 0.05)
        for z in inside + outside:
            dl = cp.double_layer(curve, g, z, tol=1e-8)
            re_c = cp.cauchy_integral(curve, g, z, tol=1e-8).real
            worst = max(worst, abs(dl - re_c))
    ok = worst <= 1e-7
    _emit(4, ok, f"normal-kernel vs real-part route max diff {worst:.3e} "
                 f"at 100 points per side on circle and ellipse")
    assert worst <= 1e-7


def test_criterion_5_upper_bound_ratios(circle1024):
    start = time.time()
    g = cp.holder_density(0j, 0.5)
    eps = (circle1024.diameter_d / 8.0) * 2.0 ** -np.arange(6)
    report = cp.build_bound_report(circle1024, g, eps, sides="plus")
    r1 = report.omega_solid_plus / report.bound_thm1
    r2 = report.omega_solid_plus / report.bound_thm2
    s1 = float(r1.max() / r1.min())
    s2 = float(r2.max() / r2.min())
    wall = time.time() - start
    ok = s1 <= 10.0 and s2 <= 10.0 and wall < 300.0
    _emit(5, ok, f"ratio spreads {s1:.2f} / {s2:.2f} over six dyadic eps "
                 f"in {wall:.1f}s")
    assert s1 <= 10.0
    assert s2 <= 10.0
    assert wall < 300.0


def test_criterion_6_closed_form_bounds():
    table = OmegaTable.from_function(lambda e: e, 1e-6, 4.0)
    worst_thm2 = 0.0
    for eps in (0.25, 0.1, 0.05):
        got = cp.bound_thm2(table, eps, 2.0)
        worst_thm2 = max(worst_thm2, abs(got - eps * math.log(4.0 / eps)))
    sqrt_table = OmegaTable.from_function(math.sqrt, 1e-6, 4.0)
    zyg_err = abs(cp.bound_zygmund(sqrt_table, 0.25, 2.0) - 1.75)
    worst_dini = 0.0
    for alpha in (1.0, 0.5, 0.25):
        got = float(cp.dini_integral(lambda e: e ** alpha, 1.0))
        worst_dini = max(worst_dini, abs(got - 1.0 / alpha))
    ok = worst_thm2 <= 1e-3 and zyg_err <= 1e-3 and worst_dini <= 1e-3
    _emit(6, ok, f"tail-bound err {worst_thm2:.2e}, combined-bound err "
                 f"{zyg_err:.2e}, dini err {worst_dini:.2e}")
    assert worst_thm2 <= 1e-3
    assert zyg_err <= 1e-3
    assert worst_dini <= 1e-3


def test_criterion_7_extremal_density(circle1024, g3, mu_id):
    exact = 32.0 * (1.0 / 6.0 - math.log(3.0) / 8.0)
    err_closed = abs(g3(-2.0 + 0.0j) - exact)
    at_zero = abs(g3(0.0j))
    conj_err = 0.0
    for t in circle1024.points[:: 16]:
        conj_err = max(conj_err, abs(g3(complex(t).conjugate()) - g3(complex(t))))
    eps = 2.0 ** -np.arange(2, 7)
    omega = cp.modulus_table(g3, circle1024, eps)
    ratios = omega / mu_id(eps)
    spread = float(ratios.max() / ratios.min())
    ok = (err_closed <= 1e-4 and at_zero == 0.0 and conj_err <= 1e-8
          and spread <= 10.0)
    _emit(7, ok, f"closed-form err {err_closed:.2e}, value at origin "
                 f"{at_zero:g}, conjugation asymmetry {conj_err:.2e}, "
                 f"modulus/majorant spread {spread:.2f}")
    assert err_closed <= 1e-4
    assert at_zero == 0.0
    assert conj_err <= 1e-8
    assert spread <= 10.0


def test_criterion_8_sharpness_lower_bound(mu_id):
    start = time.time()
    eps = 2.0 ** -np.arange(2, 7)
    ratios = {}
    for n in (512, 1024):
        curve = cp.build_curve(REFERENCE, n_samples=n)
        g = cp.theorem3_density(mu_id)
        report = cp.build_bound_report(curve, g, eps, sides=("plus",),
                                       mu=mu_id)
        ratios[n] = report.ratio_lower[np.argsort(report.eps)[::-1]]
    low = ratios[512]
    spread = float(low.max() / low.min())
    rerun_shift = float(np.max(np.abs(ratios[1024] - ratios[512]) / low))
    wall = time.time() - start
    ok = (low.min() > 0 and spread <= 100.0 and rerun_shift <= 0.20
          and wall < 600.0)
    _emit(8, ok, f"lower ratios in [{low.min():.4f}, {low.max():.4f}], "
                 f"spread {spread:.2f}, doubled-resolution shift "
                 f"{rerun_shift:.1%}, {wall:.0f}s")
    assert low.min() > 0
    assert spread <= 100.0
    assert rerun_shift <= 0.20
    assert wall < 600.0


def test_criterion_9_oscillation_monotone(circle512, re_g, holder_half):
    eps = 0.25 * 2.0 ** -np.arange(6)
    for g in (holder_half, re_g):
        vals = np.array([cp.m_gamma(circle512, g, e) for e in eps])
        ok = bool(np.all(vals[1:] <= vals[:-1] * 1.05 + 1e-12))
        if not ok:
            _emit(9, False, f"oscillation functional not non-increasing: {vals}")
        assert ok
    const_vals = [cp.m_gamma(circle512, cp.const_density(3.0), e) for e in eps]
    ok = all(v == 0.0 for v in const_vals)
    _emit(9, ok, "oscillation functional non-increasing for Dini densities, "
                 "identically zero for constants")
    assert ok
