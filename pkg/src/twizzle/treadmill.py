"""Treadmill coordinates for planar curves and the first-order CMC condition.

The ell-treadmill of a curve is sigma_ell = (1 - ell) s - gamma' conj(gamma) / v
(s arc length, v speed).  ell = 1 gives the treadmillsled tau, which depends
only on the pointwise 1-jet and is invariant under rotations of the curve.

Writing gamma' = v e^{i phi} (phi the tangent angle), tau = -e^{i phi}
conj(gamma), and along any curve

    tau' = i phi' tau - v.

Reconstruction inverts this relation: given a path p(t) = (x, y),
phi' = y'/x (finite at x = 0 on genuine treadmill paths, where y' vanishes
simultaneously), v = -x' - phi' y > 0, and gamma = -e^{i phi} conj(p)
algebraically, so tau[gamma] = p holds exactly up to the quadrature of phi.
One global rotation (the constant of integration of phi) is free; we pin
phi(start) = 0.

The first-order CMC condition in these coordinates is the level equation

    H (x^2 + y^2) - 2 m y / sqrt(m^2 + x^2) = M        (residual form)

stated for the rolling orientation in which the circle of radius r maps to
(0, +r).  Our tau maps the counterclockwise circle to (0, -r), so the
conservation-consistent condition along tau-paths carries +2my; the solver
and the equivalence check apply the y-flip, and C = -pi M then holds
pointwise along any curve.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .conservation import ConservationData, conserved_quantity
from .curve import BaseCurve, planar_dot
from .errors import DomainError, NonMonotoneArclength, SingularDenominator
from .quadrature import fd_derivative
from .spaceform import EUCLIDEAN3
from .twizzler import Twizzler

__all__ = [
    "TreadmillPath",
    "treadmill",
    "support_tau",
    "reconstruct",
    "treadmill_residual",
    "cmc_level_residual",
    "equivalence_check",
    "write_path_csv",
    "read_path_csv",
]


@dataclass(frozen=True)
class TreadmillPath:
    """Sampled ell-treadmill of a curve (parameter strictly increasing)."""

    ell: float
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    dx: Optional[np.ndarray] = None
    dy: Optional[np.ndarray] = None
    provenance: Optional[BaseCurve] = field(default=None, repr=False)

    def __post_init__(self):
        if self.t.ndim != 1 or np.any(np.diff(self.t) <= 0):
            raise DomainError("path parameter must be strictly increasing")
        if not (len(self.t) == len(self.x) == len(self.y)):
            raise DomainError("path arrays must be aligned")

    def points(self):
        return self.x + 1j * self.y


def _cumulative_arclength(curve: BaseCurve, t):
    """Arc length at each sample via per-panel Gauss-Legendre (12 nodes)."""
    xg, wg = np.polynomial.legendre.leggauss(12)
    t = np.asarray(t, dtype=float)
    mids = (t[1:] + t[:-1]) / 2
    halfs = (t[1:] - t[:-1]) / 2
    nodes = mids[:, None] + halfs[:, None] * xg[None, :]
    _, dg, _ = curve.jet(nodes.ravel())
    speeds = np.abs(dg).reshape(nodes.shape)
    panels = halfs * np.sum(wg[None, :] * speeds, axis=1)
    return np.concatenate([[0.0], np.cumsum(panels)])


def treadmill(curve: BaseCurve, ell: float, *, samples: int = 1024, grid=None) -> TreadmillPath:
    """Pointwise evaluation of sigma_ell along the curve.

    For ell = 1 every output point depends only on (gamma, gamma') at that
    parameter, so piecewise and non-convex curves need no special casing.
    For ell != 1 the arc length is measured from the left endpoint.
    Analytic path derivatives are stored to make reconstruction accurate.
    """
    a, b = curve.domain
    t = np.asarray(grid, dtype=float) if grid is not None else np.linspace(a, b, samples)
    g, dg, ddg = curve.jet(t)
    v = np.abs(dg)
    if np.min(v) <= 1e-12:
        raise DomainError("zero-speed point on the curve")
    jet_part = -dg * np.conj(g) / v
    sigma = jet_part
    if ell != 1.0:
        # s is measured from the curve's left endpoint, not the grid start
        from .curve import arclength

        s = arclength(curve, t[0]) + _cumulative_arclength(curve, t)
        sigma = sigma + (1.0 - ell) * s
    # sigma' = -ell v + i phi' * (jet part), phi' = k v the tangent-angle rate
    k = (np.conj(dg) * ddg).imag / v**3
    phi_rate = k * v
    dsigma = 1j * phi_rate * jet_part - v
    if ell != 1.0:
        dsigma = dsigma + (1.0 - ell) * v
    return TreadmillPath(
        ell=float(ell), t=t, x=sigma.real, y=sigma.imag,
        dx=dsigma.real, dy=dsigma.imag, provenance=curve,
    )


def support_tau(sc, *, samples: int = 1024) -> TreadmillPath:
    """Treadmillsled of a support-parameterized curve: theta -> (-q', -q)."""
    a, b = sc.domain
    th = np.linspace(a, b, samples)
    q, qp, qpp = sc.evaluate(th)
    # tau = -q' - i q; derivative in theta follows from the chain rule
    return TreadmillPath(
        ell=1.0, t=th, x=-qp, y=-q, dx=-qpp, dy=-qp, provenance=None,
    )


def _reconstruct_arc(t, x, y, dx, dy, *, eps_x, eps_d):
    p = x + 1j * y
    with np.errstate(divide="ignore", invalid="ignore"):
        phi_rate = dy / x
    small = np.abs(x) <= eps_x
    if np.any(small):
        bad = small & (np.abs(dy) > eps_d)
        if np.any(bad):
            raise SingularDenominator(np.nonzero(bad)[0].tolist())
        good = ~small
        if good.sum() < 2:
            raise DomainError("arc too short to reconstruct")
        phi_rate[small] = np.interp(t[small], t[good], phi_rate[good])
    v = -dx - phi_rate * y
    if np.min(v) <= 0:
        raise NonMonotoneArclength(
            f"recovered speed s' <= 0 (min {np.min(v):.3e}); not a treadmill path"
        )
    rate_spline = CubicHermiteSpline(t, phi_rate, fd_derivative(t, phi_rate))
    anti = rate_spline.antiderivative()
    phi = anti(t) - anti(t[0])
    gamma = -np.exp(1j * phi) * np.conj(p)
    dgamma = v * np.exp(1j * phi)
    dv = fd_derivative(t, v)
    ddgamma = (dv + 1j * v * phi_rate) * np.exp(1j * phi)
    return BaseCurve.from_samples(t, gamma, dgamma, ddgamma, metadata={"source": "treadmill-reconstruct"})


def reconstruct(path: TreadmillPath) -> BaseCurve:
    """Invert the treadmillsled on an ell = 1 path.

    The recovered curve satisfies tau[gamma] = path pointwise; the free
    global rotation is pinned by phi(start) = 0.  Interior zeros of
    x x' + y y' that are not matched by vanishing y' split the data into
    arcs; SingularDenominator is raised with the per-arc reconstructions
    (each with its own unknown rotation) attached.
    """
    if path.ell != 1.0:
        raise DomainError("reconstruction is defined for ell = 1 paths")
    t, x, y = path.t, path.x, path.y
    if len(t) < 4:
        raise DomainError("need at least 4 samples to reconstruct")
    scale = max(np.max(np.hypot(x, y)), 1e-12)
    if np.max(np.hypot(x - np.mean(x), y - np.mean(y))) <= 1e-9 * scale:
        # constant point: tau' = i phi' tau - v forces x = 0, and the curve
        # is the circle of radius |y| with orientation -sign(y)
        x0, y0 = float(np.mean(x)), float(np.mean(y))
        if abs(x0) > 1e-6 * scale:
            raise NonMonotoneArclength("constant path off the y-axis is not a treadmill")
        if abs(y0) <= 1e-12:
            raise DomainError("constant path at the origin is degenerate")
        orient = -np.sign(y0)
        t0 = t[0]

        def gamma(s):
            return 1j * y0 * np.exp(1j * orient * (np.asarray(s) - t0))

        return BaseCurve.from_callables(
            gamma,
            lambda s: 1j * orient * gamma(s),
            lambda s: -gamma(s),
            domain=(t[0], t[-1]),
            metadata={"source": "treadmill-reconstruct", "branch": "circle", "radius": abs(y0)},
        )
    dx = path.dx if path.dx is not None else fd_derivative(t, x)
    dy = path.dy if path.dy is not None else fd_derivative(t, y)
    scale = max(np.max(np.hypot(x, y)), 1.0)
    eps_x = 1e-8 * scale
    eps_d = 1e-4 * max(np.max(np.hypot(dx, dy)), 1e-12)
    try:
        return _reconstruct_arc(t, x, y, dx, dy, eps_x=eps_x, eps_d=eps_d)
    except SingularDenominator as exc:
        # split at the flagged indices and reconstruct each arc separately
        splits = [i for i in exc.split_indices]
        edges = [0] + splits + [len(t)]
        arcs = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            lo2, hi2 = lo + (lo > 0), hi
            if hi2 - lo2 >= 4:
                try:
                    arcs.append(
                        _reconstruct_arc(
                            t[lo2:hi2], x[lo2:hi2], y[lo2:hi2],
                            dx[lo2:hi2], dy[lo2:hi2], eps_x=eps_x, eps_d=eps_d,
                        )
                    )
                except (SingularDenominator, NonMonotoneArclength, DomainError):
                    pass
        raise SingularDenominator(splits, arcs=arcs) from None


def treadmill_residual(x, y, H: float, m: float, M: float):
    """Residual H (x^2 + y^2) - 2 m y / sqrt(m^2 + x^2) - M.

    This is the level form in the rolling orientation where circles map to
    (0, +r); evaluate at (x, -y) for paths produced by :func:`treadmill`.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return H * (x * x + y * y) - 2.0 * m * y / np.sqrt(m * m + x * x) - M


def cmc_level_residual(x, y, H: float, m: float, M: float):
    """CMC level residual along our tau-paths: H (x^2+y^2) + 2my/sqrt(m^2+x^2) - M."""
    return treadmill_residual(x, -np.asarray(y, dtype=float), H, m, M)


def equivalence_check(curve: BaseCurve, m: float, H: float, *, samples: int = 200) -> ConservationData:
    """Compare the conserved quantity with the treadmill constant.

    C(u) comes from the closed-form conservation law of the twizzler
    <curve, m>; M(u) is fitted from the CMC level form along tau[curve].
    For any curve C = -pi M holds pointwise, so the reported gap measures
    numerical consistency, while the spreads of C and M flag non-CMC input.
    """
    t = Twizzler(EUCLIDEAN3, curve, m)
    a, b = curve.domain
    pad = (b - a) * 1e-6
    u = np.linspace(a + pad, b - pad, samples)
    C = conserved_quantity(t, u, H)
    path = treadmill(curve, 1.0, grid=u)
    M_hat = cmc_level_residual(path.x, path.y, H, m, 0.0)
    C_med = float(np.median(C))
    M_med = float(np.median(M_hat))
    return ConservationData(
        H=H,
        C=C_med,
        M=M_med,
        deviation=float(np.max(np.abs(C - C_med))),
        m_deviation=float(np.max(np.abs(M_hat - M_med))),
        equivalence_gap=float(np.max(np.abs(C + np.pi * M_hat))),
    )


def write_path_csv(path_obj: TreadmillPath, path):
    with open(path, "w", encoding="ascii") as fh:
        fh.write("t,x,y\n")
        for row in zip(path_obj.t, path_obj.x, path_obj.y):
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")


def read_path_csv(path, ell: float = 1.0) -> TreadmillPath:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip() for line in fh if line.strip() and not line.startswith("#")]
    if header[:3] != ["t", "x", "y"]:
        raise DomainError(f"bad treadmill CSV header {header!r}")
    if not rows:
        raise DomainError("treadmill CSV has no samples")
    data = np.array([[float(x) for x in r.split(",")] for r in rows])
    return TreadmillPath(ell=ell, t=data[:, 0], x=data[:, 1], y=data[:, 2])
