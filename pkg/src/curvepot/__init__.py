"""Logarithmic double layer potentials and Cauchy-type integrals on
sampled Jordan curves, with modulus-of-continuity bound reports."""

from .argbranch import (ArgBranch, StieltjesConvergenceError,
                        StieltjesLimitResult, arg_branch, arg_variation,
                        stieltjes_arg_integral, stieltjes_from_branch,
                        stieltjes_limit)
from .bounds import (BoundReport, ClosureGrid, DiniResult, OmegaTable,
                     SharpnessResult, TableCoverageError, bound_thm1,
                     bound_thm2, bound_zygmund, build_bound_report,
                     build_closure_grid, closure_field_values, dini_integral,
                     head_integral, m_gamma_table, measured_omega_table,
                     sharpness_ratios, solid_modulus, solid_modulus_table,
                     tail_integral)
from .curves import (ArcNeighborhood, CurveSpecError, JordanCurve,
                     ahlfors_report, arc_neighborhood, build_curve,
                     circle_curve, diameter, ellipse_curve, kral_integral,
                     kral_sup, perturbed_circle_curve, polygon_curve,
                     ray_intersection_count)
from .densities import (Density, DensitySpecError, Majorant, MajorantError,
                        QuadratureError, const_density, holder_density,
                        majorant_ratio_check, make_majorant, modulus_table,
                        modulus_of_continuity, normal_certificate_residual,
                        parse_density, re_density, theorem3_density)
from .potentials import (PotentialField, boundary_value, cauchy_integral,
                         double_layer, field_eval, m_gamma, potential_field,
                         winding_number)

__version__ = "0.1.0"

__all__ = [
    "ArgBranch", "StieltjesConvergenceError", "StieltjesLimitResult",
    "arg_branch", "arg_variation", "stieltjes_arg_integral",
    "stieltjes_from_branch", "stieltjes_limit",
    "BoundReport", "ClosureGrid", "DiniResult", "OmegaTable",
    "SharpnessResult", "TableCoverageError", "bound_thm1", "bound_thm2",
    "bound_zygmund", "build_bound_report", "build_closure_grid",
    "closure_field_values", "dini_integral", "head_integral", "m_gamma_table",
    "measured_omega_table", "sharpness_ratios", "solid_modulus",
    "solid_modulus_table", "tail_integral",
    "ArcNeighborhood", "CurveSpecError", "JordanCurve", "ahlfors_report",
    "arc_neighborhood", "build_curve", "circle_curve", "diameter",
    "ellipse_curve", "kral_integral", "kral_sup", "perturbed_circle_curve",
    "polygon_curve", "ray_intersection_count",
    "Density", "DensitySpecError", "Majorant", "MajorantError",
    "QuadratureError", "const_density", "holder_density",
    "majorant_ratio_check", "make_majorant", "modulus_table",
    "modulus_of_continuity", "normal_certificate_residual", "parse_density",
    "re_density", "theorem3_density",
    "PotentialField", "boundary_value", "cauchy_integral", "double_layer",
    "field_eval", "m_gamma", "potential_field", "winding_number",
]
