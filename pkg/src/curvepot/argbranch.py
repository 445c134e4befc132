"""Continuous argument branches along a punctured curve.

For a base point xi on the curve, arg(t - xi) has a continuous branch on
the curve minus the base point.  It is recovered here by unwrapping the
principal argument along the sample sequence that starts just past xi
and ends just before it.  Values at the puncture are approached by
quadratic extrapolation from the three nearest samples on each side, so
the total increment converges at cubic rate in the sample spacing.

The branch is the integrator for truncated Stieltjes integrals of
densities against d arg(t - xi); an additive constant (gauge) never
affects the results.
"""

from __future__ import annotations

import warnings

import numpy as np

from .curves import JordanCurve


_KINK_SECOND_DIFF = 0.1   # radians; smooth stencils stay well below this


class StieltjesConvergenceError(RuntimeError):
    """Truncated Stieltjes values failed to settle within the schedule."""

    def __init__(self, message, last_values):
        super().__init__(message)
        self.last_values = tuple(last_values)


class StieltjesLimitResult:
    """Converged truncation limit with its delta schedule."""

    def __init__(self, value, converged, deltas, values):
        self.value = float(value)
        self.converged = bool(converged)
        self.deltas = np.asarray(deltas, dtype=float)
        self.values = np.asarray(values, dtype=float)

    def __float__(self):
        return self.value

    def __repr__(self):
        return (f"StieltjesLimitResult(value={self.value:.6g}, "
                f"converged={self.converged}, steps={len(self.values)})")


class ArgBranch:
    """Unwound argument values at every sample except the base point.

    Attributes
    ----------
    base_point : complex
        The sample the branch is punctured at.
    base_index : int
    order : ndarray
        Sample indices in traversal order, starting just past the base
        point; length n - 1.
    values : ndarray
        Unwrapped argument of (sample - base_point) along ``order``.
    start_value, end_value : float
        Extrapolated one-sided limits approaching the base point.
    total_increment : float
        end_value - start_value; gauge independent.
    variation : float
        Total variation of the branch including the extrapolated limits.
    """

    def __init__(self, base_point, base_index, order, values,
                 start_value, end_value):
        self.base_point = complex(base_point)
        self.base_index = int(base_index)
        self.order = order
        self.values = values
        self.start_value = float(start_value)
        self.end_value = float(end_value)
        self.total_increment = float(end_value - start_value)
        path = np.concatenate([[start_value], values, [end_value]])
        self.variation = float(np.sum(np.abs(np.diff(path))))

    def shifted(self, constant: float) -> "ArgBranch":
        """Same branch in a different gauge."""
        return ArgBranch(self.base_point, self.base_index, self.order,
                         self.values + constant,
                         self.start_value + constant,
                         self.end_value + constant)


def arg_branch(curve: JordanCurve, xi: complex) -> ArgBranch:
    """Continuous branch of arg(t - xi) on the curve minus the base sample."""
    n = curve.n_samples
    k = curve.nearest_sample_index(xi)
    base = complex(curve.points[k])
    order = (k + 1 + np.arange(n - 1)) % n
    rel = curve.points[order] - base
    values = np.unwrap(np.angle(rel))
    steps = np.abs(np.diff(values))
    if steps.size and steps.max() >= np.pi * (1.0 - 1e-9):
        raise ValueError(
            "argument step of size ~pi between neighbouring samples; "
            "sampling too coarse near the base point")
    # quadratic extrapolation to the puncture from each side; a large
    # second difference means the stencil straddles a corner, where the
    # adjacent piece is straight and the boundary sample already carries
    # the one-sided limit
    start = 3.0 * values[0] - 3.0 * values[1] + values[2]
    if abs(values[0] - 2.0 * values[1] + values[2]) > _KINK_SECOND_DIFF:
        start = values[0]
    end = 3.0 * values[-1] - 3.0 * values[-2] + values[-3]
    if abs(values[-1] - 2.0 * values[-2] + values[-3]) > _KINK_SECOND_DIFF:
        end = values[-1]
    return ArgBranch(base, k, order, values, start, end)


def arg_variation(curve: JordanCurve, xi: complex) -> float:
    """Total variation of the argument branch based at xi."""
    return arg_branch(curve, xi).variation


# -- Stieltjes integration against the branch ----------------------------


def _midpoint_values(h, curve: JordanCurve) -> np.ndarray:
    """h at the parameter midpoints between consecutive samples."""
    if hasattr(h, "midpoint_values"):
        return h.midpoint_values(curve)
    mids = curve.level_nodes(1)[1][1::2]
    try:
        vals = np.asarray(h(mids), dtype=float)
        if vals.shape == mids.shape:
            return vals
    except (TypeError, ValueError):
        pass
    return np.asarray([float(h(t)) for t in mids], dtype=float)


def _value_at(h, t: complex) -> float:
    return float(h(t))


def _chord_data(curve, branch, h):
    """Per-chord Stieltjes data: increments, midpoint h values, radii.

    The two half-chords touching the base point are appended with the
    extrapolated branch limits as their increments; their clearance and
    outer radius both equal the outer endpoint's distance, so they enter
    a truncation as soon as they poke out of the delta-disk, matching
    the delta -> 0 limit of the Riemann-Stieltjes sum.
    """
    rad = np.abs(curve.points[branch.order] - branch.base_point)
    da = np.diff(branch.values)
    hmid_all = _midpoint_values(h, curve)
    hmid = hmid_all[branch.order[:-1]]
    rmin = np.minimum(rad[:-1], rad[1:])
    rmax = np.maximum(rad[:-1], rad[1:])
    n = curve.n_samples
    end_da = np.array([branch.values[0] - branch.start_value,
                       branch.end_value - branch.values[-1]])
    end_h = hmid_all[[branch.base_index, (branch.base_index - 1) % n]]
    end_rad = rad[[0, -1]]
    return (np.concatenate([da, end_da]), np.concatenate([hmid, end_h]),
            np.concatenate([rmin, end_rad]), np.concatenate([rmax, end_rad]))


def stieltjes_from_branch(curve: JordanCurve, branch: ArgBranch, h,
                          delta: float) -> float:
    """Riemann-Stieltjes sum of h d(arg) over the curve outside the
    delta-disk around the branch base point.

    A chord contributes when both its endpoints lie strictly outside the
    disk; h is taken at the chord's parameter midpoint.
    """
    if delta < 0:
        raise ValueError(f"delta must be non-negative, got {delta}")
    if delta >= curve.diameter_d:
        warnings.warn("truncation radius at or above the curve diameter; "
                      "empty integration set", RuntimeWarning, stacklevel=2)
        return 0.0
    da, hmid, rmin, _ = _chord_data(curve, branch, h)
    keep = rmin > delta
    return float(np.sum(hmid[keep] * da[keep]))


def stieltjes_arg_integral(curve: JordanCurve, xi: complex, h,
                           delta: float) -> float:
    """Truncated Stieltjes integral of h against d arg(t - xi)."""
    return stieltjes_from_branch(curve, arg_branch(curve, xi), h, delta)


def stieltjes_limit(curve: JordanCurve, xi: complex, g, tol: float = 1e-5,
                    max_halvings: int = 14, strict: bool = True,
                    ) -> StieltjesLimitResult:
    """Truncation limit of the Stieltjes integral of (g - g(xi)) d arg.

    Truncation radii follow the schedule d * 2**-k for k = 3..max_halvings;
    convergence is declared when two successive values differ by less
    than tol.  With strict=True a failure to settle raises
    StieltjesConvergenceError carrying the last two values.
    """
    branch = arg_branch(curve, xi)
    gxi = _value_at(g, branch.base_point)
    da, hmid, rmin, _ = _chord_data(curve, branch, g)
    hmid = hmid - gxi

    # chords sorted by clearance radius; prefix sums give every truncation
    sort = np.argsort(-rmin, kind="stable")
    sorted_rmin = rmin[sort]
    prefix = np.concatenate([[0.0], np.cumsum(hmid[sort] * da[sort])])

    d = curve.diameter_d
    ks = np.arange(3, max_halvings + 1)
    deltas = d * np.power(2.0, -ks.astype(float))
    counts = np.searchsorted(-sorted_rmin, -deltas, side="left")
    values = prefix[counts]

    diffs = np.abs(np.diff(values))
    settled = np.flatnonzero(diffs < tol)
    if settled.size:
        stop = settled[0] + 1
        return StieltjesLimitResult(values[stop], True,
                                    deltas[:stop + 1], values[:stop + 1])
    if strict:
        tail = tuple(values[-2:])
        raise StieltjesConvergenceError(
            f"no convergence within {len(deltas)} truncation steps at "
            f"base point {branch.base_point:.6g}: last values "
            + ", ".join(f"{v:.8g}" for v in tail), tail)
    return StieltjesLimitResult(values[-1], False, deltas, values)
