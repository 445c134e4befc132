"""Deterministic CSV and SVG output.

CSV files are assembled fully in memory and written atomically (temp
file plus rename), with every float formatted through the same 12-digit
rule so identical configs produce byte-identical files.  SVG rendering
uses the Agg backend with a fixed hash salt and stripped date metadata.
"""

from __future__ import annotations

import hashlib
import os
import tempfile

import numpy as np


def format_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (complex, np.complexfloating)):
        return f"{x.real:.12g}{x.imag:+.12g}j"
    return f"{float(x):.12g}"


def config_hash(mapping: dict) -> str:
    lines = [f"{k}={format_number(v) if isinstance(v, (int, float, complex, np.number)) else v}"
             for k, v in sorted(mapping.items()) if v is not None]
    digest = hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()
    return digest[:12]


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, header, rows, comments=()) -> None:
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(format_number(v) if not isinstance(v, str) else v
                              for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "curvepot"
    import matplotlib.pyplot as plt
    return plt


def render_loglog_svg(path: str, x, series: dict, title: str,
                      xlabel: str, ylabel: str) -> None:
    """One log-log line per series; non-positive entries are dropped
    since they carry no order-of-smallness information."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    x = np.asarray(x, dtype=float)
    drew = False
    for label, values in series.items():
        values = np.asarray(values, dtype=float)
        mask = (values > 0) & (x > 0)
        if not np.any(mask):
            continue
        ax.loglog(x[mask], values[mask], marker="o", markersize=3.5,
                  linewidth=1.2, label=label)
        drew = True
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, which="both", linewidth=0.3, alpha=0.5)
    if drew:
        ax.legend(fontsize=8)
    else:
        ax.text(0.5, 0.5, "all series non-positive", ha="center",
                va="center", transform=ax.transAxes)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def render_field_scan_svg(path: str, points, values, curve_points,
                          title: str) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.5, 6.0))
    points = np.asarray(points, dtype=complex)
    values = np.asarray(values, dtype=float)
    sc = ax.scatter(points.real, points.imag, c=values, s=9.0,
                    cmap="viridis", linewidths=0)
    ax.plot(np.append(curve_points.real, curve_points.real[0]),
            np.append(curve_points.imag, curve_points.imag[0]),
            color="black", linewidth=1.0)
    ax.set_aspect("equal")
    ax.set_title(title)
    fig.colorbar(sc, ax=ax, shrink=0.85)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def render_geometry_svg(path: str, eps, theta_ratio, xi_index, kral_vals,
                        variation_vals, title: str) -> None:
    plt = _pyplot()
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10.0, 4.2))
    eps = np.asarray(eps, dtype=float)
    ratio = np.asarray(theta_ratio, dtype=float)
    mask = (eps > 0) & (ratio > 0)
    ax1.loglog(eps[mask], ratio[mask], marker="o", markersize=3.5)
    ax1.set_xlabel("epsilon")
    ax1.set_ylabel("theta(eps) / eps")
    ax1.set_title("arc-measure ratio")
    ax1.grid(True, which="both", linewidth=0.3, alpha=0.5)
    ax2.plot(xi_index, kral_vals, marker=".", linewidth=0.8,
             label="ray-count integral")
    ax2.plot(xi_index, variation_vals, marker="x", markersize=3,
             linewidth=0.0, label="arg variation")
    ax2.set_xlabel("sample index")
    ax2.set_ylabel("variation")
    ax2.grid(True, linewidth=0.3, alpha=0.5)
    ax2.legend(fontsize=8)
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
