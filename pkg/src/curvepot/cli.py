"""Experiment front end.

Five subcommands wire the library into reproducible runs: `geometry`
(arc-measure and ray-count functionals), `jump-test` (one-sided boundary
values and the jump relation), `zygmund-check` (full bound report),
`sharpness` (lower-bound ratios for the extremal density), and
`potential-scan` (field values on a planar grid).  Every run writes CSV,
and where declared SVG, into --out-dir with a config hash in each
filename; identical configs produce byte-identical CSV.

Exit codes: 0 pass, 1 config error, 2 invariant failure, 3 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields, replace

import numpy as np

from .argbranch import StieltjesConvergenceError, arg_variation
from .bounds import build_bound_report, sharpness_ratios
from .curves import (CurveSpecError, JordanCurve, ahlfors_report, build_curve,
                     kral_integral)
from .densities import (DensitySpecError, MajorantError, QuadratureError,
                        parse_density)
from .potentials import (PotentialField, boundary_value, field_eval,
                         winding_number)
from .reports import (config_hash, format_number, render_field_scan_svg,
                      render_geometry_svg, render_loglog_svg, write_csv)

EXIT_PASS = 0
EXIT_CONFIG = 1
EXIT_INVARIANT = 2
EXIT_NONCONVERGENCE = 3

_JUMP_RESIDUAL_CAP = 1e-8
_BANACH_RESIDUAL_CAP = 0.02
_RATIO_SPREAD_CAP = 10.0
_SHARPNESS_SPREAD_CAP = 100.0
_RATIO_FLOOR = 1e-14


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str = ""
    curve: str = "circle:center=-1,radius=1"
    density: str = "re"
    side: str = "both"
    eps_start: float = 0.25
    eps_factor: float = 0.5
    eps_count: int = 6
    samples: int = 512
    tol: float = 1e-6
    out_dir: str = "."
    seed: int | None = None
    n_angles: int = 720
    stieltjes_max_k: int = 14
    xi_count: int | None = None
    scan_res: int = 41

    def eps_grid(self) -> np.ndarray:
        return self.eps_start * self.eps_factor ** np.arange(self.eps_count)

    def validate(self) -> None:
        if self.side not in ("plus", "minus", "both"):
            raise ConfigError(f"side must be plus, minus, or both, got {self.side!r}")
        for name in ("eps_start", "eps_factor", "tol"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("eps_count", "samples", "n_angles", "scan_res",
                     "stieltjes_max_k"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.xi_count is not None and self.xi_count <= 0:
            raise ConfigError("xi_count must be positive")

    def hash(self) -> str:
        skip = {"out_dir"}
        return config_hash({f.name: getattr(self, f.name)
                            for f in fields(self) if f.name not in skip})


_FIELD_TYPES = {f.name: f for f in fields(ExperimentConfig)}


def _coerce(name: str, raw: str):
    name = name.replace("-", "_")
    if name not in _FIELD_TYPES or name == "command":
        raise ConfigError(f"unknown config key {name!r}")
    if name in ("curve", "density", "side", "out_dir"):
        return name, raw
    if name in ("eps_start", "eps_factor", "tol"):
        return name, float(raw)
    return name, int(raw)


def read_config_file(path: str) -> dict:
    out = {}
    try:
        with open(path, "r", encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value")
                key, val = line.split("=", 1)
                try:
                    name, value = _coerce(key.strip(), val.strip())
                except ValueError as exc:
                    raise ConfigError(f"{path}:{lineno}: {exc}") from exc
                out[name] = value
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="curvepot", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--curve", type=str, default=None)
    common.add_argument("--density", type=str, default=None)
    common.add_argument("--side", type=str, default=None,
                        choices=("plus", "minus", "both"))
    common.add_argument("--eps-start", type=float, default=None)
    common.add_argument("--eps-factor", type=float, default=None)
    common.add_argument("--eps-count", type=int, default=None)
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--out-dir", type=str, default=None)
    common.add_argument("--config", type=str, default=None,
                        help="flat key=value file; explicit flags override it")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--n-angles", type=int, default=None)
    common.add_argument("--stieltjes-max-k", type=int, default=None)
    common.add_argument("--xi-count", type=int, default=None)
    common.add_argument("--scan-res", type=int, default=None)
    for name in ("geometry", "jump-test", "zygmund-check", "sharpness",
                 "potential-scan"):
        sub.add_parser(name, parents=[common])
    return parser


def parse_config(argv) -> ExperimentConfig:
    ns = _build_parser().parse_args(argv)
    cfg = ExperimentConfig(command=ns.command)
    if ns.config is not None:
        cfg = replace(cfg, **read_config_file(ns.config))
    overrides = {}
    for f in fields(ExperimentConfig):
        if f.name == "command":
            continue
        val = getattr(ns, f.name, None)
        if val is not None:
            overrides[f.name] = val
    cfg = replace(cfg, **overrides)
    cfg.validate()
    return cfg


# -- shared helpers ------------------------------------------------------


def _xi_indices(curve: JordanCurve, count: int) -> np.ndarray:
    count = min(count, curve.n_samples)
    return np.unique((np.arange(count) * curve.n_samples) // count)


def _out_path(cfg: ExperimentConfig, stem: str, ext: str) -> str:
    import os
    return os.path.join(cfg.out_dir, f"{stem}-{cfg.hash()}.{ext}")


def _common_comments(cfg: ExperimentConfig) -> list[str]:
    return [f"config_hash={cfg.hash()}",
            f"curve={cfg.curve}",
            f"density={cfg.density}",
            f"samples={cfg.samples}"]


# -- subcommands ---------------------------------------------------------


def cmd_geometry(cfg: ExperimentConfig) -> int:
    curve = build_curve(cfg.curve, cfg.samples)
    eps = cfg.eps_grid()
    ahlfors = ahlfors_report(curve, np.sort(eps))
    idx = _xi_indices(curve, cfg.xi_count or 64)
    kral_vals = np.array([kral_integral(curve, curve.points[i], cfg.n_angles)
                          for i in idx])
    var_vals = np.array([arg_variation(curve, curve.points[i]) for i in idx])
    residual = np.abs(kral_vals - var_vals) / np.maximum(var_vals, 1e-300)

    comments = _common_comments(cfg)
    write_csv(_out_path(cfg, "geometry-ahlfors", "csv"),
              ("epsilon", "theta", "theta_over_eps"), ahlfors, comments)
    kral_rows = [(int(i), curve.points[i].real, curve.points[i].imag,
                  kral_vals[j], var_vals[j], residual[j])
                 for j, i in enumerate(idx)]
    write_csv(_out_path(cfg, "geometry-kral", "csv"),
              ("xi_index", "xi_re", "xi_im", "kral_integral", "arg_variation",
               "rel_residual"), kral_rows, comments)
    render_geometry_svg(_out_path(cfg, "geometry", "svg"), ahlfors[:, 0],
                        ahlfors[:, 2], idx, kral_vals, var_vals,
                        f"geometry: {curve.label}")

    problems = []
    if not np.all(np.isfinite(ahlfors)):
        problems.append("non-finite arc-measure entries")
    if np.any(np.diff(ahlfors[:, 1]) < -1e-9):
        problems.append("arc measure not non-decreasing in eps")
    worst = float(residual.max())
    if worst > _BANACH_RESIDUAL_CAP:
        problems.append(
            f"ray-count integral vs arg variation residual {worst:.3%} "
            f"exceeds {_BANACH_RESIDUAL_CAP:.0%}")
    print(f"geometry: kral sup {kral_vals.max():.6g} over {len(idx)} base "
          f"points, max indicatrix residual {worst:.3%}, "
          f"theta/eps max {ahlfors[:, 2].max():.6g}")
    for p in problems:
        print(f"invariant failure: {p}", file=sys.stderr)
    return EXIT_INVARIANT if problems else EXIT_PASS


def cmd_jump_test(cfg: ExperimentConfig) -> int:
    curve = build_curve(cfg.curve, cfg.samples)
    g = parse_density(cfg.density)
    idx = _xi_indices(curve, cfg.xi_count or 256)
    rows = []
    worst = 0.0
    for i in idx:
        xi = complex(curve.points[i])
        plus = boundary_value(curve, g, xi, "plus",
                              max_halvings=cfg.stieltjes_max_k)
        minus = boundary_value(curve, g, xi, "minus",
                               max_halvings=cfg.stieltjes_max_k)
        residual = (plus - minus) - g(xi)
        worst = max(worst, abs(residual))
        rows.append((xi, plus, minus, residual))
    write_csv(_out_path(cfg, "jump-test", "csv"),
              ("xi", "plus", "minus", "jump_residual"), rows,
              _common_comments(cfg))
    print(f"jump-test: {len(rows)} base points, max |residual| {worst:.3e}")
    if worst > _JUMP_RESIDUAL_CAP:
        print(f"invariant failure: jump residual {worst:.3e} exceeds "
              f"{_JUMP_RESIDUAL_CAP:g}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_PASS


def _ratio_spread_problems(report) -> list[str]:
    problems = []
    in_range = report.out_of_range == 0
    for name in ("ratio_thm1", "ratio_thm2"):
        vals = getattr(report, name)[in_range]
        vals = vals[vals > _RATIO_FLOOR]
        if len(vals) >= 2:
            spread = float(vals.max() / vals.min())
            if spread > _RATIO_SPREAD_CAP:
                problems.append(
                    f"{name} spread {spread:.3g} exceeds {_RATIO_SPREAD_CAP:g}")
    return problems


def cmd_zygmund_check(cfg: ExperimentConfig) -> int:
    curve = build_curve(cfg.curve, cfg.samples)
    g = parse_density(cfg.density)
    report = build_bound_report(curve, g, cfg.eps_grid(), sides=cfg.side,
                                tol=cfg.tol)
    comments = _common_comments(cfg) + [
        f"sides={'+'.join(report.sides)}",
        f"dini_value={format_number(report.dini_value)}",
        f"dini_diverged={int(report.dini_diverged)}",
        f"r_out={format_number(report.r_out)}"]
    from .bounds import REPORT_COLUMNS
    write_csv(_out_path(cfg, "zygmund-check", "csv"),
              REPORT_COLUMNS + ("out_of_range",), report.rows(), comments)
    render_loglog_svg(
        _out_path(cfg, "zygmund-check", "svg"), report.eps,
        {"omega_curve": report.omega_curve,
         "omega_solid_plus": report.omega_solid_plus,
         "omega_solid_minus": report.omega_solid_minus,
         "m_gamma": report.m_gamma,
         "bound_thm1": report.bound_thm1,
         "bound_thm2": report.bound_thm2,
         "bound_zygmund": report.bound_zygmund},
        f"bounds: {curve.label}, g={report.density_label}",
        "epsilon", "modulus / bound")
    problems = report.validate() + _ratio_spread_problems(report)
    print(f"zygmund-check: {len(report.eps)} eps rows, "
          f"dini={report.dini_value:.6g}"
          f"{' (diverged)' if report.dini_diverged else ''}, "
          f"max ratio_thm1 {report.ratio_thm1.max():.4g}")
    for p in problems:
        print(f"invariant failure: {p}", file=sys.stderr)
    return EXIT_INVARIANT if problems else EXIT_PASS


def _is_reference_circle(curve: JordanCurve) -> bool:
    z0 = complex(curve.parametrization(np.array([0.0]))[0])
    z_half = complex(curve.parametrization(np.array([0.5]))[0])
    return (curve.family == "circle" and abs(z0) < 1e-12
            and abs(z_half + 2.0) < 1e-12)


def cmd_sharpness(cfg: ExperimentConfig) -> int:
    curve = build_curve(cfg.curve, cfg.samples)
    g = parse_density(cfg.density)
    if g.mu is None:
        raise ConfigError("sharpness needs a thm3:mu=... density")
    if not _is_reference_circle(curve):
        raise ConfigError(
            "sharpness is defined on the reference circle "
            "circle:center=-1,radius=1")
    eps = cfg.eps_grid()
    if np.any(eps > 0.25 + 1e-12):
        raise ConfigError("sharpness eps grid must lie in (0, 1/4]")
    report = build_bound_report(curve, g, eps, sides=("plus",), mu=g.mu,
                                tol=cfg.tol)
    result = sharpness_ratios(report, g.mu)
    comments = _common_comments(cfg) + [
        f"min_ratio_lower={format_number(result.min_lower)}",
        f"max_ratio_lower={format_number(result.max_lower)}",
        f"min_ratio_upper={format_number(result.min_upper)}",
        f"max_ratio_upper={format_number(result.max_upper)}"]
    rows = list(zip(result.eps, result.ratio_lower, result.ratio_upper))
    write_csv(_out_path(cfg, "sharpness", "csv"),
              ("epsilon", "ratio_lower", "ratio_upper"), rows, comments)
    render_loglog_svg(
        _out_path(cfg, "sharpness", "svg"), result.eps,
        {"ratio_lower": result.ratio_lower, "ratio_upper": result.ratio_upper,
         "omega_solid_plus": report.omega_solid_plus},
        f"sharpness: g={report.density_label}", "epsilon", "ratio")
    spread = result.lower_spread
    print(f"sharpness: ratio_lower in [{result.min_lower:.4g}, "
          f"{result.max_lower:.4g}], spread {spread:.3g}")
    if result.min_lower <= 0 or spread > _SHARPNESS_SPREAD_CAP:
        print(f"invariant failure: ratio_lower min {result.min_lower:.3g}, "
              f"spread {spread:.3g} (cap {_SHARPNESS_SPREAD_CAP:g})",
              file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_PASS


def cmd_potential_scan(cfg: ExperimentConfig) -> int:
    curve = build_curve(cfg.curve, cfg.samples)
    g = parse_density(cfg.density)
    pts = curve.points
    margin = 0.25 * curve.diameter_d
    x = np.linspace(pts.real.min() - margin, pts.real.max() + margin,
                    cfg.scan_res)
    y = np.linspace(pts.imag.min() - margin, pts.imag.max() + margin,
                    cfg.scan_res)
    xx, yy = np.meshgrid(x, y)
    zs = (xx + 1j * yy).ravel()
    if cfg.seed is not None:
        rng = np.random.default_rng(cfg.seed)
        cell = (x[1] - x[0]) + 1j * (y[1] - y[0])
        zs = zs + (rng.uniform(-0.35, 0.35, zs.shape) * cell.real
                   + 1j * rng.uniform(-0.35, 0.35, zs.shape) * cell.imag)
    fields_by_side = {"plus": PotentialField(curve, g, "plus", tol=cfg.tol),
                      "minus": PotentialField(curve, g, "minus", tol=cfg.tol)}
    wanted = ("plus", "minus") if cfg.side == "both" else (cfg.side,)
    rows, scan_pts, scan_vals = [], [], []
    for z in zs:
        if curve.distance_to_samples(z) <= 0.75 * curve.spacing:
            continue
        side = "plus" if winding_number(curve, z) != 0 else "minus"
        if side not in wanted:
            continue
        value = field_eval(fields_by_side[side], z)
        rows.append((z.real, z.imag, side, value))
        scan_pts.append(z)
        scan_vals.append(value)
    write_csv(_out_path(cfg, "potential-scan", "csv"),
              ("x", "y", "side", "value"), rows, _common_comments(cfg))
    render_field_scan_svg(_out_path(cfg, "potential-scan", "svg"),
                          np.asarray(scan_pts), np.asarray(scan_vals), pts,
                          f"potential: {curve.label}, g={g.label}")
    print(f"potential-scan: {len(rows)} grid points, value range "
          f"[{min(scan_vals):.4g}, {max(scan_vals):.4g}]")
    return EXIT_PASS


_COMMANDS = {
    "geometry": cmd_geometry,
    "jump-test": cmd_jump_test,
    "zygmund-check": cmd_zygmund_check,
    "sharpness": cmd_sharpness,
    "potential-scan": cmd_potential_scan,
}


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except (ConfigError, CurveSpecError, DensitySpecError, MajorantError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _COMMANDS[cfg.command](cfg)
    except (ConfigError, CurveSpecError, DensitySpecError, MajorantError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (StieltjesConvergenceError, QuadratureError) as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except ValueError as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
