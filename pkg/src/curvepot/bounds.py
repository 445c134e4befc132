"""Solid moduli of continuity on closure grids and the bound functionals.

Everything here consumes measured or analytic moduli through OmegaTable,
a log-spaced table with optional small-eta extension, and produces the
per-epsilon report rows the CLI serializes.  Integrals against 1/eta and
1/eta^2 weights run as trapezoid sums in log eta, which is exact for
omega(eta) = eta and accurate to a few 1e-5 relative for the other
closed-form checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .curves import JordanCurve, diameter
from .densities import modulus_table
from .potentials import (PotentialField, boundary_value, cauchy_integral,
                         m_gamma, winding_number)

_trapz = getattr(np, "trapezoid", np.trapz if hasattr(np, "trapz") else None)

_NODES_PER_DECADE = 64
_HEAD_DEPTH = 20            # head integrals reach down to eps * 2**-_HEAD_DEPTH
_DINI_BLOCKS = 96
_DINI_FLAT_TOL = 1e-6


class TableCoverageError(ValueError):
    pass


def _log_nodes(a: float, b: float, per_decade: int = _NODES_PER_DECADE,
               min_nodes: int = 9) -> np.ndarray:
    decades = math.log10(b / a)
    n = max(min_nodes, int(math.ceil(decades * per_decade)) + 1)
    return np.exp(np.linspace(math.log(a), math.log(b), n))


def _log_trapezoid(values: np.ndarray, etas: np.ndarray) -> float:
    # integral of f d eta written as integral of f(e^u) e^u du
    return float(_trapz(values * etas, np.log(etas)))


class OmegaTable:
    """Nondecreasing modulus-of-continuity table on a log-spaced grid.

    Built either from a callable (kept for refinement below the grid) or
    from measured values; measured tables get a power-law fit through
    their smallest positive decade so head integrals and Dini sums can
    reach below the measurement resolution.
    """

    def __init__(self, etas, values, fn=None):
        etas = np.asarray(etas, dtype=float)
        values = np.asarray(values, dtype=float)
        if etas.ndim != 1 or etas.shape != values.shape or len(etas) < 2:
            raise ValueError("need matching 1-d eta and value arrays, >= 2 entries")
        if np.any(np.diff(etas) <= 0) or etas[0] <= 0:
            raise ValueError("eta grid must be positive and strictly increasing")
        if np.any(values < 0) or np.any(np.diff(values) < -1e-12 * max(values[-1], 1.0)):
            raise ValueError("omega values must be non-negative and non-decreasing")
        self.etas = etas
        self.values = np.maximum.accumulate(values)
        self.fn = fn
        self._fit = None if fn is not None else self._fit_small_eta()

    @property
    def eta_min(self) -> float:
        return float(self.etas[0])

    @property
    def eta_max(self) -> float:
        return float(self.etas[-1])

    @classmethod
    def from_function(cls, fn, eta_min: float, eta_max: float,
                      per_decade: int = _NODES_PER_DECADE) -> "OmegaTable":
        etas = _log_nodes(eta_min, eta_max, per_decade)
        vals = np.asarray([float(fn(e)) for e in etas], dtype=float)
        return cls(etas, vals, fn=fn)

    @classmethod
    def from_measured(cls, etas, values) -> "OmegaTable":
        return cls(etas, values, fn=None)

    def _fit_small_eta(self):
        """Power law c*eta^alpha through the smallest decade with positive
        values; None when the table is identically zero there."""
        pos = np.nonzero(self.values > 0)[0]
        if len(pos) == 0:
            return None
        e0 = self.etas[pos[0]]
        sel = pos[self.etas[pos] <= 10.0 * e0]
        if len(sel) == 1:
            # one usable point: continue linearly through the origin
            return (float(self.values[sel[0]] / self.etas[sel[0]]), 1.0)
        x = np.log(self.etas[sel])
        y = np.log(self.values[sel])
        alpha, logc = np.polyfit(x, y, 1)
        return (float(np.exp(logc)), float(alpha))

    def covers(self, a: float, b: float) -> bool:
        return (self.eta_min <= a * (1 + 1e-9)) and (self.eta_max >= b * (1 - 1e-9))

    def __call__(self, eta):
        eta = np.asarray(eta, dtype=float)
        scalar = eta.ndim == 0
        eta = np.atleast_1d(eta)
        if np.any(eta > self.eta_max * (1 + 1e-9)):
            raise TableCoverageError(
                f"eta beyond table range (max {self.eta_max:g})")
        eta = np.minimum(eta, self.eta_max)
        out = np.interp(eta, self.etas, self.values)
        below = eta < self.eta_min
        if np.any(below):
            if self.fn is not None:
                out[below] = [float(self.fn(e)) for e in eta[below]]
            elif self._fit is None:
                out[below] = 0.0
            else:
                c, alpha = self._fit
                out[below] = c * eta[below] ** alpha
        return float(out[0]) if scalar else out


def measured_omega_table(g, curve: JordanCurve, eta_min: float,
                         eta_max: float, extra_etas=None,
                         per_decade: int = _NODES_PER_DECADE) -> OmegaTable:
    """Modulus of g over curve samples, tabulated on a log grid merged
    with any extra abscissas (so report epsilons are exact table nodes)."""
    etas = _log_nodes(eta_min, eta_max, per_decade)
    if extra_etas is not None:
        etas = np.unique(np.concatenate([etas, np.asarray(extra_etas, float)]))
    vals = modulus_table(g, curve, etas)
    return OmegaTable.from_measured(etas, vals)


# -- bound functionals ---------------------------------------------------


def tail_integral(omega_table: OmegaTable, eps: float, upper: float) -> float:
    """Integral of omega(eta)/eta^2 over [eps, upper] on the table grid."""
    if eps <= 0 or upper <= eps:
        raise ValueError(f"need 0 < eps < upper, got eps={eps}, upper={upper}")
    if not omega_table.covers(eps, upper):
        raise TableCoverageError(
            f"omega table [{omega_table.eta_min:g}, {omega_table.eta_max:g}] "
            f"does not cover [{eps:g}, {upper:g}]")
    inner = omega_table.etas[(omega_table.etas > eps) & (omega_table.etas < upper)]
    etas = np.concatenate([[eps], inner, [upper]])
    vals = omega_table(etas)
    return _log_trapezoid(vals / etas ** 2, etas)


def head_integral(omega_table: OmegaTable, eps: float) -> float:
    """Integral of omega(eta)/eta over (0, eps], refined down to
    eps * 2**-20; the remaining mass below that is dropped."""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    eta_min = eps * 2.0 ** -_HEAD_DEPTH
    if omega_table.fn is not None:
        etas = _log_nodes(eta_min, eps)
        vals = np.asarray([float(omega_table.fn(e)) for e in etas])
        return _log_trapezoid(vals / etas, etas)
    # measured table: analytic power-fit part below the grid, trapezoid above
    fit = omega_table._fit
    if fit is None:
        return 0.0
    c, alpha = fit
    if alpha <= 1e-9:
        raise ValueError(
            "measured omega table shows no decay at small eta "
            f"(fitted exponent {alpha:.3g}); the eta^-1 integral diverges")
    e0 = min(omega_table.eta_min, eps)
    head = (c / alpha) * (e0 ** alpha - eta_min ** alpha) if e0 > eta_min else 0.0
    if eps > e0:
        inner = omega_table.etas[(omega_table.etas > e0) & (omega_table.etas < eps)]
        etas = np.concatenate([[e0], inner, [eps]])
        vals = omega_table(etas)
        head += _log_trapezoid(vals / etas, etas)
    return head


def bound_thm1(omega_table: OmegaTable, m_value: float, eps: float,
               d: float) -> float:
    """m_value plus eps times the eta^-2 tail of omega over [eps, 2d]."""
    return m_value + bound_thm2(omega_table, eps, d)


def bound_thm2(omega_table: OmegaTable, eps: float, d: float) -> float:
    """eps times the eta^-2 tail of omega over [eps, 2d]."""
    return eps * tail_integral(omega_table, eps, 2.0 * d)


def bound_zygmund(omega_table: OmegaTable, eps: float, d: float) -> float:
    """Head integral of omega/eta up to eps plus the thm2 tail term."""
    return head_integral(omega_table, eps) + bound_thm2(omega_table, eps, d)


@dataclass(frozen=True)
class DiniResult:
    value: float
    diverged: bool

    def __float__(self):
        return self.value


def dini_integral(omega_or_mu, upper: float) -> DiniResult:
    """Integral of omega(eta)/eta over (0, upper] by dyadic blocks.

    Sums 96 dyadic blocks from the smallest up; flags divergence when the
    deepest block still contributes more than 1e-6 of the running total,
    which a Dini modulus cannot do.
    """
    if upper <= 0:
        raise ValueError(f"upper must be positive, got {upper}")
    fn = omega_or_mu
    blocks = []
    for k in range(_DINI_BLOCKS):
        a = upper * 2.0 ** -(k + 1)
        b = upper * 2.0 ** -k
        etas = _log_nodes(a, b, min_nodes=21)
        vals = np.asarray([float(fn(e)) for e in etas])
        blocks.append(_log_trapezoid(vals / etas, etas))
    total = 0.0
    for contribution in reversed(blocks):
        total += contribution
    deepest = blocks[-1]
    diverged = deepest > _DINI_FLAT_TOL * max(total, 1.0)
    return DiniResult(float(total), bool(diverged))


# -- closure grids and solid moduli --------------------------------------


class ClosureGrid:
    """Curve samples plus geometric offset layers on one side.

    Layers sit at rho_j = d * 2**-j, j = 2..10 by default, pushed along
    the side's normal and kept only when the winding number agrees with
    the declared side.  The minus side records the truncation radius
    R_out = 2d inside which its sup runs.
    """

    def __init__(self, side, points, is_boundary, rhos, r_out):
        self.side = side
        self.points = np.asarray(points, dtype=complex)
        self.is_boundary = np.asarray(is_boundary, dtype=bool)
        self.rhos = np.asarray(rhos, dtype=float)
        self.r_out = float(r_out)

    def __len__(self):
        return len(self.points)

    def validate(self, curve: JordanCurve) -> list[str]:
        problems = []
        if np.any(np.diff(self.rhos) <= 0):
            problems.append("offset ladder not strictly increasing")
        off = self.points[~self.is_boundary]
        for z in off[:: max(1, len(off) // 64)]:
            enclosed = winding_number(curve, z) != 0
            if enclosed != (self.side == "plus"):
                problems.append(f"point {z:g} classifies to the wrong side")
                break
        if self.side == "minus":
            dist = np.array([curve.distance_to_samples(z) for z in off])
            if len(dist) and dist.max() > self.r_out:
                problems.append("minus-side point beyond the truncation radius")
        return problems


def build_closure_grid(curve: JordanCurve, side: str, j_min: int = 2,
                       j_max: int = 10) -> ClosureGrid:
    if side not in ("plus", "minus"):
        raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")
    d = curve.diameter_d
    rhos = d * 2.0 ** -np.arange(j_max, j_min - 1, -1)   # increasing
    _, pts, dpts = curve.level_nodes(0)
    inward = 1j * dpts / np.abs(dpts)
    direction = inward if side == "plus" else -inward
    layers = [pts]
    flags = [np.ones(len(pts), dtype=bool)]
    for rho in rhos:
        cand = pts + rho * direction
        keep = np.array([(winding_number(curve, z) != 0) == (side == "plus")
                         for z in cand])
        layers.append(cand[keep])
        flags.append(np.zeros(int(keep.sum()), dtype=bool))
    return ClosureGrid(side, np.concatenate(layers), np.concatenate(flags),
                       rhos, 2.0 * d)


def closure_field_values(field: PotentialField, grid: ClosureGrid,
                         stieltjes_tol: float = 1e-5) -> np.ndarray:
    """Field values on a closure grid: curve samples through the one-sided
    boundary formula, offset points through the contour quadrature."""
    if field.side != grid.side:
        raise ValueError(
            f"field side {field.side!r} does not match grid side {grid.side!r}")
    curve, g = field.curve, field.density
    out = np.empty(len(grid), dtype=float)
    for i in range(len(grid)):
        z = complex(grid.points[i])
        cached = field._cache.get(z)
        if cached is None:
            if grid.is_boundary[i]:
                cached = boundary_value(curve, g, z, field.side,
                                        tol=stieltjes_tol)
            else:
                cached = float(cauchy_integral(curve, g, z,
                                               tol=field.tol).real)
            field._cache[z] = cached
        out[i] = cached
    return out


def _binned_pair_oscillation(points, values, eps_grid, block: int = 256):
    """Per-eps sup of |v_i - v_j| over distinct pairs with |z_i - z_j|
    <= eps, plus the pair count per eps (both cumulative in eps)."""
    eps_grid = np.asarray(eps_grid, dtype=float)
    n_bins = len(eps_grid)
    best = np.zeros(n_bins)
    counts = np.zeros(n_bins, dtype=np.int64)
    n = len(points)
    for start in range(0, n, block):
        sl = slice(start, min(start + block, n))
        dz = np.abs(points[sl, None] - points[None, :])
        dv = np.abs(values[sl, None] - values[None, :])
        idx = np.searchsorted(eps_grid, dz, side="left")
        ok = (idx < n_bins) & (dz > 0)
        np.maximum.at(best, idx[ok], dv[ok])
        np.add.at(counts, idx[ok], 1)
    return np.maximum.accumulate(best), np.cumsum(counts)


def solid_modulus_table(field: PotentialField, grid: ClosureGrid, eps_grid,
                        stieltjes_tol: float = 1e-5) -> np.ndarray:
    eps_grid = np.asarray(eps_grid, dtype=float)
    if np.any(eps_grid <= 0):
        raise ValueError("eps values must be positive")
    order = np.argsort(eps_grid, kind="stable")
    values = closure_field_values(field, grid, stieltjes_tol)
    osc, counts = _binned_pair_oscillation(grid.points, values,
                                           eps_grid[order])
    if counts[0] == 0:
        raise ValueError(
            f"no grid point pairs within eps={eps_grid[order][0]:g}; "
            "eps is below the grid resolution")
    out = np.empty_like(osc)
    out[order] = osc
    return out


def solid_modulus(field: PotentialField, grid: ClosureGrid, eps: float,
                  stieltjes_tol: float = 1e-5) -> float:
    return float(solid_modulus_table(field, grid, [eps], stieltjes_tol)[0])


# -- report assembly -----------------------------------------------------

REPORT_COLUMNS = ("epsilon", "omega_curve", "omega_solid_plus",
                  "omega_solid_minus", "m_gamma", "bound_thm1", "bound_thm2",
                  "bound_zygmund", "ratio_thm1", "ratio_thm2", "ratio_lower")


@dataclass
class BoundReport:
    curve_label: str
    density_label: str
    d: float
    n_samples: int
    sides: tuple
    eps: np.ndarray
    omega_curve: np.ndarray
    omega_solid_plus: np.ndarray
    omega_solid_minus: np.ndarray
    m_gamma: np.ndarray
    bound_thm1: np.ndarray
    bound_thm2: np.ndarray
    bound_zygmund: np.ndarray
    ratio_thm1: np.ndarray
    ratio_thm2: np.ndarray
    ratio_lower: np.ndarray
    out_of_range: np.ndarray
    dini_value: float
    dini_diverged: bool
    r_out: float
    mu_label: str | None = None
    omega_table: OmegaTable | None = dc_field(default=None, repr=False)

    def rows(self):
        """Column-ordered rows; out_of_range rides along as a 12th field."""
        for i in range(len(self.eps)):
            yield (self.eps[i], self.omega_curve[i], self.omega_solid_plus[i],
                   self.omega_solid_minus[i], self.m_gamma[i],
                   self.bound_thm1[i], self.bound_thm2[i],
                   self.bound_zygmund[i], self.ratio_thm1[i],
                   self.ratio_thm2[i], self.ratio_lower[i],
                   int(self.out_of_range[i]))

    def validate(self) -> list[str]:
        problems = []
        for name in REPORT_COLUMNS[1:]:
            col = getattr(self, name)
            if not np.all(np.isfinite(col)):
                problems.append(f"column {name} has non-finite entries")
            elif np.any(col < 0):
                problems.append(f"column {name} has negative entries")
        for name in ("omega_curve", "omega_solid_plus", "omega_solid_minus"):
            col = getattr(self, name)
            if np.any(np.diff(col) < -1e-9 * max(1.0, float(col[-1]))):
                problems.append(f"column {name} not non-decreasing in eps")
        lhs = self.bound_thm1
        rhs = self.bound_thm2 + self.m_gamma
        if np.max(np.abs(lhs - rhs)) > 1e-9 * max(1.0, float(np.max(lhs))):
            problems.append("bound_thm1 != bound_thm2 + m_gamma")
        return problems


def _safe_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.zeros_like(num)
    ok = den > 0
    out[ok] = num[ok] / den[ok]
    return out


def m_gamma_table(curve: JordanCurve, g, eps_grid, n_deltas: int = 10):
    return np.array([m_gamma(curve, g, e, n_deltas) for e in eps_grid])


def build_bound_report(curve: JordanCurve, g, eps_grid, sides=("plus", "minus"),
                       mu=None, tol: float = 1e-6, stieltjes_tol: float = 1e-5,
                       n_deltas: int = 10) -> BoundReport:
    """Assemble the full per-epsilon table for one curve and density.

    Epsilons are processed in increasing order.  Ratio columns divide by
    the plus-side solid modulus; a side that was not requested reports
    zeros.  ratio_lower is zero unless a majorant mu is supplied, in
    which case its denominator is eps times the eta^-2 tail of mu over
    [eps, 4], the reference interval of the sharpness construction.
    """
    if isinstance(sides, str):
        sides = ("plus", "minus") if sides == "both" else (sides,)
    for s in sides:
        if s not in ("plus", "minus"):
            raise ValueError(f"unknown side {s!r}")
    eps = np.sort(np.asarray(eps_grid, dtype=float))
    if len(eps) == 0 or eps[0] <= 0:
        raise ValueError("eps grid must be non-empty and positive")
    d = curve.diameter_d

    table = measured_omega_table(g, curve, eps[0] / 2.0, 2.0 * d,
                                 extra_etas=eps)
    omega_curve = table(eps)
    m_vals = m_gamma_table(curve, g, eps, n_deltas)
    thm2 = np.array([bound_thm2(table, e, d) for e in eps])
    thm1 = thm2 + m_vals
    zyg = np.array([bound_zygmund(table, e, d) for e in eps])
    dini = dini_integral(table, 2.0 * d)

    solids = {}
    for side in ("plus", "minus"):
        if side in sides:
            grid = build_closure_grid(curve, side)
            fld = PotentialField(curve, g, side, tol=tol)
            solids[side] = solid_modulus_table(fld, grid, eps, stieltjes_tol)
        else:
            solids[side] = np.zeros_like(eps)

    ratio1 = _safe_ratio(solids["plus"], thm1)
    ratio2 = _safe_ratio(solids["plus"], thm2)
    if mu is not None:
        mu_table = OmegaTable.from_function(mu, eps[0] / 4.0, 4.0)
        lower_den = np.array([e * tail_integral(mu_table, e, 4.0) for e in eps])
        ratio_low = _safe_ratio(solids["plus"], lower_den)
        mu_label = getattr(mu, "kind", None)
    else:
        ratio_low = np.zeros_like(eps)
        mu_label = None

    return BoundReport(
        curve_label=curve.label, density_label=getattr(g, "label", repr(g)),
        d=d, n_samples=curve.n_samples, sides=tuple(sides), eps=eps,
        omega_curve=omega_curve, omega_solid_plus=solids["plus"],
        omega_solid_minus=solids["minus"], m_gamma=m_vals, bound_thm1=thm1,
        bound_thm2=thm2, bound_zygmund=zyg, ratio_thm1=ratio1,
        ratio_thm2=ratio2, ratio_lower=ratio_low,
        out_of_range=(eps > d / 8.0 + 1e-12).astype(int),
        dini_value=dini.value, dini_diverged=dini.diverged, r_out=2.0 * d,
        mu_label=mu_label, omega_table=table)


@dataclass(frozen=True)
class SharpnessResult:
    eps: np.ndarray
    ratio_lower: np.ndarray
    ratio_upper: np.ndarray
    min_lower: float
    max_lower: float
    min_upper: float
    max_upper: float

    @property
    def lower_spread(self) -> float:
        return self.max_lower / self.min_lower if self.min_lower > 0 else math.inf


def sharpness_ratios(report: BoundReport, mu) -> SharpnessResult:
    """Lower and upper sharpness ratios of the plus-side solid modulus.

    ratio_lower divides by eps * integral of mu(eta)/eta^2 over [eps, 4];
    ratio_upper divides by bound_thm2.
    """
    eps = report.eps
    mu_table = OmegaTable.from_function(mu, float(eps[0]) / 4.0, 4.0)
    den_low = np.array([e * tail_integral(mu_table, e, 4.0) for e in eps])
    if np.any(den_low <= 1e-300):
        raise ValueError("sharpness denominator underflow")
    ratio_low = report.omega_solid_plus / den_low
    ratio_up = _safe_ratio(report.omega_solid_plus, report.bound_thm2)
    return SharpnessResult(
        eps=eps, ratio_lower=ratio_low, ratio_upper=ratio_up,
        min_lower=float(ratio_low.min()), max_lower=float(ratio_low.max()),
        min_upper=float(ratio_up.min()), max_upper=float(ratio_up.max()))


__all__ = [
    "OmegaTable", "TableCoverageError", "measured_omega_table",
    "tail_integral", "head_integral", "bound_thm1", "bound_thm2",
    "bound_zygmund", "DiniResult", "dini_integral", "ClosureGrid",
    "build_closure_grid", "closure_field_values", "solid_modulus",
    "solid_modulus_table", "REPORT_COLUMNS", "BoundReport",
    "build_bound_report", "m_gamma_table", "SharpnessResult",
    "sharpness_ratios", "diameter",
]
