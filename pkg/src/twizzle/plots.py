"""Figure rendering for the CLI report paths.

Every command that writes a delimited report also renders a small
matplotlib figure next to it (PNG, Agg backend, deterministic).  These
helpers are kept headless-safe and side-effect free apart from the file
they write; each returns the output path.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = [
    "save_curve_figure",
    "save_flux_figure",
    "save_treadmill_figure",
    "save_mesh_figure",
    "save_equivalence_figure",
]

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0

_RC = {
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
    "figure.figsize": (6.4, 6.4 * _GOLDEN),
}


def _finish(fig, path):
    fig.savefig(path)
    plt.close(fig)
    return path


def save_curve_figure(curve, path, *, title=None, samples=800):
    """Base curve in the plane plus its treadmillsled path."""
    from .treadmill import treadmill

    with plt.rc_context(_RC):
        fig, (ax1, ax2) = plt.subplots(1, 2)
        u = np.linspace(curve.domain[0], curve.domain[1], samples)
        g = curve(u)
        ax1.plot(g.real, g.imag, lw=1.0)
        ax1.plot(g.real[0], g.imag[0], "o", ms=3)
        ax1.set_aspect("equal", adjustable="datalim")
        ax1.set_xlabel("x")
        ax1.set_ylabel("y")
        ax1.set_title(title or "base curve")
        try:
            path_obj = treadmill(curve, 1.0, samples=min(samples, 600))
            ax2.plot(path_obj.x, path_obj.y, lw=1.0, color="tab:orange")
            ax2.plot(path_obj.x[0], path_obj.y[0], "o", ms=3, color="tab:orange")
            ax2.set_aspect("equal", adjustable="datalim")
            ax2.set_title("treadmill path")
        except Exception:  # diagnostics only; never block the report
            ax2.set_axis_off()
        ax2.set_xlabel("x")
        fig.tight_layout()
        return _finish(fig, path)


def save_flux_figure(report, path, *, title=None):
    """Conserved quantity along u: quadrature vs closed form, plus residual."""
    with plt.rc_context(_RC):
        fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True)
        ax1.plot(report.u, report.omega, lw=1.0, label="flux quadrature")
        ax1.plot(
            report.u, report.flux_sign * report.closed_form,
            lw=1.0, ls="--", label="closed form (oriented)",
        )
        ax1.set_ylabel("conserved quantity")
        ax1.legend(loc="best")
        if title:
            ax1.set_title(title)
        resid = np.abs(report.omega - report.flux_sign * report.closed_form)
        dev = np.abs(report.omega - report.median_omega)
        ax2.semilogy(report.u, np.maximum(resid, 1e-18), lw=1.0, label="|quad - closed|")
        ax2.semilogy(report.u, np.maximum(dev, 1e-18), lw=1.0, label="|omega - median|")
        ax2.set_xlabel("u")
        ax2.set_ylabel("residual")
        ax2.legend(loc="best")
        fig.tight_layout()
        return _finish(fig, path)


def save_treadmill_figure(path_obj, path, *, title=None):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.plot(path_obj.x, path_obj.y, lw=1.0)
        ax.plot(path_obj.x[0], path_obj.y[0], "o", ms=3)
        ax.set_aspect("equal", adjustable="datalim")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_title(title or f"ell = {path_obj.ell:g} treadmill")
        fig.tight_layout()
        return _finish(fig, path)


def save_mesh_figure(mesh, path, *, title=None):
    """3D preview of the mesh in its export chart."""
    from .twizzler import chart3

    pts = chart3(mesh)
    with plt.rc_context(_RC):
        fig = plt.figure()
        ax = fig.add_subplot(projection="3d")
        ax.plot_trisurf(
            pts[:, 0], pts[:, 1], pts[:, 2], triangles=mesh.faces,
            linewidth=0.1, antialiased=True, alpha=0.85, cmap="viridis",
        )
        ax.set_title(title or "twizzler mesh")
        return _finish(fig, path)


def save_equivalence_figure(u, C, minus_pi_M, path, *, title=None):
    with plt.rc_context(_RC):
        fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True)
        ax1.plot(u, C, lw=1.0, label="conserved quantity C")
        ax1.plot(u, minus_pi_M, lw=1.0, ls="--", label="-pi M (treadmill)")
        ax1.legend(loc="best")
        if title:
            ax1.set_title(title)
        ax2.semilogy(u, np.maximum(np.abs(C - minus_pi_M), 1e-18), lw=1.0)
        ax2.set_xlabel("u")
        ax2.set_ylabel("|C + pi M|")
        fig.tight_layout()
        return _finish(fig, path)
