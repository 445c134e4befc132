"""Boundary densities and normal majorants.

A Majorant is a certified modulus-of-continuity bound: nondecreasing,
vanishing at 0, with a growth certificate mu(lam * eta) <= sigma *
lam**k * mu(eta) for lam > 1 that is grid-verified at construction.

A Density is a real-valued function of a curve point.  Evaluations on a
curve's dyadic node grids are cached write-once per curve, which keeps
sup-scans affordable for the quadrature-backed extremal density.
"""

from __future__ import annotations

import math

import numpy as np

from .curves import JordanCurve, _parse_complex


class MajorantError(ValueError):
    """Majorant construction or certificate failure."""


class DensitySpecError(ValueError):
    """Raised for malformed density specifications."""


class QuadratureError(RuntimeError):
    """An adaptive quadrature failed to reach its tolerance."""


# -- majorants -----------------------------------------------------------

_CERT_ETAS = 2.0 ** -np.arange(0, 17)
_CERT_LAMBDAS = 2.0 ** np.arange(1, 9)
_CERT_SLACK = 1e-12


class Majorant:
    """Nondecreasing modulus majorant with a verified (sigma, k) certificate."""

    def __init__(self, evaluate, sigma, k, kind, domain_max=math.inf,
                 table_eta_min=1e-10):
        self._evaluate = evaluate
        self.sigma = float(sigma)
        self.k = float(k)
        self.kind = kind
        self.domain_max = float(domain_max)
        self._table_eta_min = min(float(table_eta_min), self.domain_max)
        self._verify()

    def __call__(self, eta):
        eta = np.asarray(eta, dtype=float)
        if np.any(eta <= 0) or np.any(eta > self.domain_max * (1.0 + 1e-9)):
            raise MajorantError(
                f"majorant argument outside (0, {self.domain_max:g}]")
        out = np.asarray(self._evaluate(np.minimum(eta, self.domain_max)),
                         dtype=float)
        return float(out) if out.ndim == 0 else out

    def _verify(self):
        etas = _CERT_ETAS[_CERT_ETAS <= self.domain_max]
        vals = self(etas)
        if np.any(vals <= 0):
            raise MajorantError(f"{self.kind}: majorant not positive on the grid")
        order = np.argsort(etas)
        if np.any(np.diff(vals[order]) < -_CERT_SLACK * np.max(vals)):
            raise MajorantError(f"{self.kind}: majorant not nondecreasing")
        for lam in _CERT_LAMBDAS:
            ok = lam * etas <= self.domain_max
            if not np.any(ok):
                continue
            lhs = self(lam * etas[ok])
            rhs = self.sigma * lam ** self.k * vals[ok]
            if np.any(lhs > rhs * (1.0 + _CERT_SLACK)):
                j = int(np.argmax(lhs / rhs))
                raise MajorantError(
                    f"{self.kind}: certificate (sigma={self.sigma:g}, k={self.k:g}) "
                    f"fails at eta={etas[ok][j]:g}, lam={lam:g}: "
                    f"{lhs[j]:.6g} > {rhs[j]:.6g}")

    def vanishes_at_zero(self, probe: float = 1e-10, tol: float = 1e-6) -> bool:
        """Whether mu tends to 0 at 0.

        The analytic kinds vanish by construction (positive power, or
        power times a bounded logarithm).  A table is judged by its own
        grid: three decades of decay from the largest to the smallest
        entry, or an absolutely tiny smallest entry.
        """
        if self.kind.startswith("power"):
            return True
        lo = float(self(self._table_eta_min))
        hi = float(self(self.domain_max))
        return lo < tol or (hi > 0 and lo <= 1e-3 * hi)

    def __repr__(self):
        return f"Majorant({self.kind}, sigma={self.sigma:g}, k={self.k:g})"


def make_majorant(kind: str, *, alpha: float | None = None,
                  etas=None, values=None,
                  sigma: float | None = None, k: float | None = None) -> Majorant:
    """Build a certified majorant.

    Kinds: "power" (eta**alpha), "power-log" (eta * ln(4e/eta) on (0, 4]),
    and "table" (linear interpolation; sigma and k must be claimed and
    are then grid-verified).
    """
    kind = kind.strip().lower().replace("_", "-")
    if kind == "power":
        if alpha is None or alpha <= 0:
            raise MajorantError(f"power majorant needs alpha > 0, got {alpha}")
        a = float(alpha)
        default_k = 1.0 if a <= 1.0 else float(math.ceil(a))
        return Majorant(lambda eta: np.power(eta, a),
                        1.0 if sigma is None else sigma,
                        default_k if k is None else k,
                        f"power({a:g})")
    if kind in ("power-log", "powerlog"):
        return Majorant(lambda eta: eta * np.log(4.0 * math.e / eta),
                        1.0 if sigma is None else sigma,
                        1.0 if k is None else k,
                        "power-log", domain_max=4.0)
    if kind == "table":
        if etas is None or values is None or sigma is None or k is None:
            raise MajorantError("table majorant needs etas, values, sigma, k")
        etas = np.asarray(etas, dtype=float)
        values = np.asarray(values, dtype=float)
        order = np.argsort(etas)
        etas, values = etas[order], values[order]
        return Majorant(lambda eta: np.interp(eta, etas, values),
                        sigma, k, "table", domain_max=float(etas[-1]),
                        table_eta_min=float(etas[0]))
    raise MajorantError(f"unknown majorant kind {kind!r}")


def majorant_ratio_check(mu: Majorant, eta1: float, eta2: float) -> bool:
    """For a class (sigma, 1) majorant, mu(eta)/eta decreases up to sigma:
    mu(eta2)/eta2 <= sigma * mu(eta1)/eta1 whenever eta1 <= eta2."""
    if mu.k != 1.0:
        raise MajorantError(
            f"ratio comparison needs a class (sigma, 1) majorant, got k={mu.k:g}")
    if not 0 < eta1 <= eta2:
        raise ValueError(f"need 0 < eta1 <= eta2, got {eta1}, {eta2}")
    lhs = float(mu(eta2)) / eta2
    rhs = mu.sigma * float(mu(eta1)) / eta1
    return lhs <= rhs * (1.0 + _CERT_SLACK)


def normal_certificate_residual(etas, values, sigma, k) -> float:
    """Worst ratio mu(eta_j) / (sigma * (eta_j/eta_i)**k * mu(eta_i)) over
    table pairs eta_i < eta_j; at most 1 for a certified table."""
    etas = np.asarray(etas, dtype=float)
    values = np.asarray(values, dtype=float)
    order = np.argsort(etas)
    etas, values = etas[order], values[order]
    worst = 0.0
    for i in range(len(etas) - 1):
        lam = etas[i + 1:] / etas[i]
        denom = sigma * lam ** k * values[i]
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(denom > 0, values[i + 1:] / denom, np.inf)
        worst = max(worst, float(np.max(r)))
    return worst


# -- densities -----------------------------------------------------------


class Density:
    """Real boundary data with per-curve cached grid evaluations."""

    def __init__(self, scalar_fn, label, array_fn=None):
        self._scalar = scalar_fn
        self._array = array_fn
        self.label = label
        self.mu = None
        self.corners: tuple = ()   # points where the density is not smooth
        self._point_cache: dict[complex, float] = {}
        self._grid_cache: dict[tuple, np.ndarray] = {}
        self._modulus_cache: dict[tuple, float] = {}

    def __call__(self, t) -> float:
        t = complex(t)
        v = self._point_cache.get(t)
        if v is None:
            v = float(self._scalar(t))
            self._point_cache[t] = v
        return v

    def values_at(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=complex)
        if self._array is not None:
            return np.asarray(self._array(ts), dtype=float)
        return np.array([self(t) for t in ts.ravel()],
                        dtype=float).reshape(ts.shape)

    def values_at_cached(self, ts) -> np.ndarray:
        """values_at through the point cache; batch-evaluates only misses.

        Worth the dict traffic for small node sets that recur across
        refinement levels and nearby field points, where the underlying
        density is the expensive part.
        """
        ts = np.asarray(ts, dtype=complex)
        flat = ts.ravel()
        out = np.empty(flat.shape, dtype=float)
        cache = self._point_cache
        miss = []
        for i, t in enumerate(flat.tolist()):
            v = cache.get(t)
            if v is None:
                miss.append(i)
            else:
                out[i] = v
        if miss:
            miss_pts = flat[miss]
            vals = self.values_at(miss_pts)
            for t, v in zip(miss_pts.tolist(), vals.tolist()):
                cache[t] = v
            out[miss] = vals
        return out.reshape(ts.shape)

    def level_values(self, curve: JordanCurve, level: int) -> np.ndarray:
        """Values on the curve's dyadic node grid, reusing coarser levels."""
        key = (curve._cache_key, level)
        cached = self._grid_cache.get(key)
        if cached is None:
            pts = curve.level_nodes(level)[1]
            if level == 0:
                cached = self.values_at(pts)
            else:
                coarse = self.level_values(curve, level - 1)
                cached = np.empty(len(pts))
                cached[0::2] = coarse
                cached[1::2] = self.values_at(pts[1::2])
            self._grid_cache[key] = cached
        return cached

    def sample_values(self, curve: JordanCurve) -> np.ndarray:
        return self.level_values(curve, 0)

    def midpoint_values(self, curve: JordanCurve) -> np.ndarray:
        return self.level_values(curve, 1)[1::2]

    def __repr__(self):
        return f"Density({self.label!r})"


def const_density(value: float) -> Density:
    v = float(value)
    return Density(lambda t: v, f"const:{v:g}",
                   array_fn=lambda ts: np.full(np.shape(ts), v))


def re_density() -> Density:
    return Density(lambda t: t.real, "re", array_fn=lambda ts: np.real(ts))


def holder_density(t0: complex, alpha: float) -> Density:
    """|t - t0|**alpha; its curve modulus behaves like eta**alpha near t0."""
    if not 0 < alpha <= 1:
        raise DensitySpecError(f"alpha must lie in (0, 1], got {alpha}")
    t0 = complex(t0)
    a = float(alpha)
    density = Density(lambda t: abs(t - t0) ** a,
                      f"holder(t0={t0:g}, alpha={a:g})",
                      array_fn=lambda ts: np.abs(np.asarray(ts) - t0) ** a)
    density.corners = (t0,)
    return density


# -- the extremal density on the circle |t + 1| = 1 ----------------------


def _adaptive_simpson(f, a, b, tol, max_depth=60):
    """Adaptive Simpson with Richardson correction; raises on depth cap."""
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    stack = [(a, fa, m, fm, b, fb, whole, tol, 0)]
    total = 0.0
    while stack:
        a0, fa0, m0, fm0, b0, fb0, whole0, tol0, depth = stack.pop()
        lm = 0.5 * (a0 + m0)
        rm = 0.5 * (m0 + b0)
        flm, frm = f(lm), f(rm)
        left = (m0 - a0) / 6.0 * (fa0 + 4.0 * flm + fm0)
        right = (b0 - m0) / 6.0 * (fm0 + 4.0 * frm + fb0)
        err = left + right - whole0
        if abs(err) <= 15.0 * tol0:
            total += left + right + err / 15.0
            continue
        if depth >= max_depth:
            raise QuadratureError(
                f"adaptive quadrature depth cap {max_depth} exceeded on "
                f"[{a0:.3e}, {b0:.3e}]")
        stack.append((a0, fa0, lm, flm, m0, fm0, left, 0.5 * tol0, depth + 1))
        stack.append((m0, fm0, rm, frm, b0, fb0, right, 0.5 * tol0, depth + 1))
    return total


_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


def _graded_panel_edges(lo: float, hi: float, depth_lo: int,
                        depth_hi: int) -> np.ndarray:
    """Edges on [lo, hi] with widths shrinking geometrically toward the
    ends whose depth is positive."""
    width = hi - lo
    edges = [lo, hi]
    if depth_lo and depth_hi:
        mid = lo + 0.5 * width
        edges.append(mid)
        edges.extend(lo + 0.5 * width * 2.0 ** -np.arange(1, depth_lo + 1))
        edges.extend(hi - 0.5 * width * 2.0 ** -np.arange(1, depth_hi + 1))
    elif depth_lo:
        edges.extend(lo + width * 2.0 ** -np.arange(1, depth_lo + 1))
    elif depth_hi:
        edges.extend(hi - width * 2.0 ** -np.arange(1, depth_hi + 1))
    return np.unique(np.asarray(edges))


def _gauss_on_unit_panels(depth_lo: int, depth_hi: int):
    """Gauss-Legendre nodes and weights for graded panels on [0, 1]."""
    edges = _graded_panel_edges(0.0, 1.0, depth_lo, depth_hi)
    a = edges[:-1][:, None]
    b = edges[1:][:, None]
    nodes = 0.5 * (a + b) + 0.5 * (b - a) * _GL_X[None, :]
    weights = 0.5 * (b - a) * _GL_W[None, :]
    return nodes.ravel(), weights.ravel()


def _radial_rule_templates(deep: int) -> dict:
    """Quadrature rules for the radial integral over (0, 1], keyed by the
    piece layout, with every node and weight affine in s = |t|.

    The integrand changes scale around eta = s and has a logarithmic
    endpoint at 0, so [0, 1] is cut at s/2, s, 2s (those inside (0, 1))
    and each piece is graded geometrically toward its active ends.  Each
    piece is an affine image of [0, 1] with endpoints c*s + d, so the
    mapped Gauss rule has nodes alpha*s + beta with fixed alpha, beta.
    """
    layouts = {
        # s <= 1/2: cuts at s/2, s, 2s; the far edge of [2s, 1] is calm
        "low": [((0.0, 0.0), (0.5, 0.0), deep, 16),
                ((0.5, 0.0), (1.0, 0.0), 16, 16),
                ((1.0, 0.0), (2.0, 0.0), 16, 16),
                ((2.0, 0.0), (0.0, 1.0), 16, 8)],
        # 1/2 < s < 1: the cut at 2s falls outside
        "mid": [((0.0, 0.0), (0.5, 0.0), deep, 16),
                ((0.5, 0.0), (1.0, 0.0), 16, 16),
                ((1.0, 0.0), (0.0, 1.0), 16, 16)],
        # s >= 1: no interior cut; grade toward 1 where the kernel peaks
        "high": [((0.0, 0.0), (0.0, 1.0), deep, 16)],
    }
    rules = {}
    for key, pieces in layouts.items():
        alpha_n, beta_n, alpha_w, beta_w = [], [], [], []
        for (c1, d1), (c2, d2), depth_lo, depth_hi in pieces:
            rel_nodes, rel_weights = _gauss_on_unit_panels(depth_lo, depth_hi)
            alpha_n.append(c1 + (c2 - c1) * rel_nodes)
            beta_n.append(d1 + (d2 - d1) * rel_nodes)
            alpha_w.append((c2 - c1) * rel_weights)
            beta_w.append((d2 - d1) * rel_weights)
        rules[key] = tuple(np.concatenate(part) for part in
                           (alpha_n, beta_n, alpha_w, beta_w))
    return rules


_EVAL_BLOCK = 128


def theorem3_density(mu: Majorant, quad_tol: float = 1e-8) -> Density:
    """Density on the circle |t + 1| = 1 whose curve modulus is controlled
    by mu while the potential's closure modulus saturates the tail
    integral lower bound.

    Needs a class (sigma, 1) majorant vanishing at 0.  Values come from
    the precomputed radial rules, evaluated for whole batches of t at
    once; within each graded panel the integrand is smooth and the fixed
    Gauss rule is exact to roundoff.
    """
    if mu.k != 1.0:
        raise MajorantError(
            f"extremal density needs a class (sigma, 1) majorant, got k={mu.k:g}")
    if not mu.vanishes_at_zero():
        raise MajorantError("extremal density needs mu tending to 0 at 0")

    # leftmost panel width ~2**-deep resolves the logarithmic endpoint
    deep = max(24, min(52, int(math.ceil(-math.log2(max(quad_tol, 1e-15))))))
    rules = _radial_rule_templates(deep)

    def eval_block(ts: np.ndarray) -> np.ndarray:
        out = np.zeros(len(ts))
        s = np.abs(ts)
        re_t2 = ts.real * ts.real - ts.imag * ts.imag
        bad = (ts.imag == 0.0) & (re_t2 > 0.0) & (re_t2 < 1.0)
        if bad.any():
            raise ValueError(
                "density kernel is singular on (0, 1) for real "
                f"t={ts[bad][0].real:g}")
        groups = [(s > 0.0) & (s <= 0.5), (0.5 < s) & (s < 1.0), s >= 1.0]
        for rule, members in zip((rules["low"], rules["mid"], rules["high"]),
                                 groups):
            if not members.any():
                continue
            alpha_n, beta_n, alpha_w, beta_w = rule
            si = s[members][:, None]
            eta = alpha_n[None, :] * si + beta_n[None, :]
            weights = alpha_w[None, :] * si + beta_w[None, :]
            e2 = eta * eta
            t2 = (ts[members] ** 2)[:, None]
            r2 = re_t2[members][:, None]
            a4 = (si * si) ** 2
            num = r2 * (e2 * e2 + a4) - 2.0 * e2 * a4
            den = np.abs(e2 - t2) ** 4
            # zero-width panels from degenerate pieces carry zero weight
            mu_vals = mu(np.maximum(eta, 1e-300))
            out[members] = 8.0 * np.sum(weights * mu_vals * num / den * eta,
                                        axis=1)
        return out

    def eval_array(ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=complex)
        flat = ts.ravel()
        out = np.empty(flat.shape)
        for start in range(0, len(flat), _EVAL_BLOCK):
            block = flat[start:start + _EVAL_BLOCK]
            out[start:start + _EVAL_BLOCK] = eval_block(block)
        return out.reshape(ts.shape)

    def evaluate(t):
        return float(eval_array(np.array([complex(t)]))[0])

    density = Density(evaluate, f"thm3(mu={mu.kind})", array_fn=eval_array)
    density.mu = mu
    density.corners = (0j,)
    return density


# -- modulus of continuity on a curve ------------------------------------


def _sample_values_of(g, curve: JordanCurve) -> np.ndarray:
    if hasattr(g, "sample_values"):
        return g.sample_values(curve)
    return np.array([float(g(t)) for t in curve.points])


def modulus_table(g, curve: JordanCurve, eps_grid) -> np.ndarray:
    """sup |g(t1) - g(t2)| over sample pairs with |t1 - t2| <= eps, for
    every eps in the grid at once (single pair sweep, binned maxima)."""
    eps = np.asarray(list(eps_grid), dtype=float)
    if eps.size == 0 or np.any(eps <= 0):
        raise ValueError("eps grid must be non-empty and positive")
    order = np.argsort(eps)
    sorted_eps = eps[order]
    gv = _sample_values_of(g, curve)
    pts = curve.points
    best = np.zeros(eps.size)
    for i in range(curve.n_samples - 1):
        dist = np.abs(pts[i + 1:] - pts[i])
        dg = np.abs(gv[i + 1:] - gv[i])
        bins = np.searchsorted(sorted_eps, dist, side="left")
        ok = bins < eps.size
        if np.any(ok):
            np.maximum.at(best, bins[ok], dg[ok])
    best = np.maximum.accumulate(best)
    out = np.empty_like(best)
    out[order] = best
    return out


def modulus_of_continuity(g, curve: JordanCurve, eps: float) -> float:
    """Curve modulus of continuity of g at scale eps (chordal distance)."""
    if isinstance(g, Density):
        key = (curve._cache_key, float(eps))
        v = g._modulus_cache.get(key)
        if v is None:
            v = float(modulus_table(g, curve, [eps])[0])
            g._modulus_cache[key] = v
        return v
    return float(modulus_table(g, curve, [eps])[0])


# -- density spec mini language ------------------------------------------


def parse_density(spec: str) -> Density:
    """Parse "const:<v>", "re", "holder:t0=<point>,alpha=<a>",
    "thm3:mu=power:<alpha>", or "thm3:mu=powerlog"."""
    spec = spec.strip().replace("−", "-")
    head, _, body = spec.partition(":")
    head = head.strip().lower()
    if head == "re":
        return re_density()
    if head == "const":
        try:
            return const_density(float(body))
        except ValueError as exc:
            raise DensitySpecError(f"bad const value {body!r}") from exc
    if head == "holder":
        t0, alpha = None, None
        for item in body.split(","):
            key, _, val = item.partition("=")
            key = key.strip()
            if key == "t0":
                t0 = _parse_complex(val)
            elif key == "alpha":
                alpha = float(val)
            else:
                raise DensitySpecError(f"unknown holder parameter {key!r}")
        if t0 is None or alpha is None:
            raise DensitySpecError("holder spec needs t0=<point>,alpha=<a>")
        return holder_density(t0, alpha)
    if head == "thm3":
        if not body.startswith("mu="):
            raise DensitySpecError("thm3 spec needs mu=power:<alpha> or mu=powerlog")
        mu_spec = body[3:].strip().lower()
        if mu_spec in ("powerlog", "power-log"):
            return theorem3_density(make_majorant("power-log"))
        if mu_spec.startswith("power:"):
            try:
                alpha = float(mu_spec[6:])
            except ValueError as exc:
                raise DensitySpecError(f"bad power exponent in {mu_spec!r}") from exc
            return theorem3_density(make_majorant("power", alpha=alpha))
        raise DensitySpecError(f"unknown majorant spec {mu_spec!r}")
    raise DensitySpecError(f"unknown density family {head!r}")
