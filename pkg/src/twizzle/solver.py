"""CMC base-curve generation from the first-order conservation condition.

R^3 goes through treadmill space: the level curve of the CMC condition is
traced by arclength predictor-corrector continuation and the base curve is
recovered by inverting the treadmillsled.  Along the level set of

    R(x, y) = H (x^2 + y^2) + 2 m y / sqrt(m^2 + x^2) - M

(the conservation-consistent orientation of the level equation; see
:mod:`twizzle.treadmill`) the recovered tangent-angle rate and speed are

    phi' = G / |grad R|,  v = 2 m (m^2 + x^2 + y^2) / ((m^2 + x^2)^{3/2} |grad R|),

with G = dR/dx / x = 2H - 2my/(m^2+x^2)^{3/2} analytic, so the
reconstruction is regular even across x = 0 and the origin, and v > 0
globally: every traced branch is a genuine base curve.

S^3 and H^3 use arclength constraint stepping.  At each radius the
closed-form conservation equation is solved for a = gamma'. i gamma (the
equation is strictly monotone in a, so the root is explicit), which fixes
the angular rate psi' = a / rho^2 and the radial energy

    (rho')^2 = P(rho) = f^2 (1 - (a/rho)^2).

P is analytic in rho, so instead of stepping rho' = +-sqrt(P) and flipping
the square-root branch at turning points (which costs accuracy exactly
there), the march integrates the equivalent regularized second-order form
rho'' = P'(rho)/2 with RK4: turning radii and circular orbits (P with a
double zero, e.g. tori) are handled with no event surgery at all.  The
recorded trajectory is smooth on a uniform grid, so finite differences of
gamma' recover gamma'' at full order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson

from .curve import BaseCurve
from .errors import AxisTouch, DomainError, EmptyLevelSet, NoRoot
from .quadrature import fd_derivative
from .spaceform import HYPERBOLIC3, SPHERE3, SpaceForm

__all__ = [
    "SolverConfig",
    "solve_r3",
    "solve_s3",
    "solve_h3",
    "write_sidecar",
]


@dataclass(frozen=True)
class SolverConfig:
    """Continuation / integration controls."""

    step: float = 1e-3
    tol_root: float = 1e-12
    max_steps: int = 40000
    branch: int = 1
    turning_eps: float = 1e-9

    def __post_init__(self):
        if not self.step > 0:
            raise DomainError("step must be positive")
        if self.max_steps < 1:
            raise DomainError("max_steps must be >= 1")


# ---------------------------------------------------------------------------
# R^3: level-set continuation + treadmill inversion
# ---------------------------------------------------------------------------


class _LevelSet:
    """The CMC level function R(x, y) and the derived reconstruction data."""

    def __init__(self, H, M, m):
        self.H, self.M, self.m = float(H), float(M), float(m)

    def value(self, x, y):
        return self.H * (x * x + y * y) + 2 * self.m * y / np.sqrt(self.m**2 + x * x) - self.M

    def grad(self, x, y):
        w = self.m**2 + x * x
        gx = x * (2 * self.H - 2 * self.m * y / w**1.5)
        gy = 2 * self.H * y + 2 * self.m / np.sqrt(w)
        return gx, gy

    def tangent(self, x, y):
        gx, gy = self.grad(x, y)
        n = np.hypot(gx, gy)
        return -gy / n, gx / n

    def recon_rates(self, x, y):
        """(phi', v) per unit path arclength; both regular, v > 0."""
        gx, gy = self.grad(x, y)
        n = np.hypot(gx, gy)
        w = self.m**2 + x * x
        G = 2 * self.H - 2 * self.m * y / w**1.5
        phi_rate = G / n
        v = 2 * self.m * (w + y * y) / (w**1.5 * n)
        return phi_rate, v

    def newton(self, x, y, tol):
        scale = max(1.0, abs(self.M), abs(self.H))
        for _ in range(60):
            f = self.value(x, y)
            if abs(f) <= tol * scale:
                return x, y
            gx, gy = self.grad(x, y)
            n2 = gx * gx + gy * gy
            if n2 < 1e-300:
                break
            x -= f * gx / n2
            y -= f * gy / n2
        f = self.value(x, y)
        if abs(f) <= 1e3 * tol * scale:
            return x, y
        raise EmptyLevelSet("Newton correction failed to land on the level set")


def _circle_curve(radius: float, orientation: int, metadata) -> BaseCurve:
    w = 1j * orientation

    def gamma(u):
        return radius * np.exp(w * u)

    def dgamma(u):
        return radius * w * np.exp(w * u)

    def ddgamma(u):
        return -radius * np.exp(w * u)

    return BaseCurve.from_callables(gamma, dgamma, ddgamma, domain=(0.0, 2 * np.pi), metadata=metadata)


def _helicoid_line(metadata, half_length: float = 5.0) -> BaseCurve:
    def gamma(u):
        return u + 0j * u

    def dgamma(u):
        return np.ones_like(u) + 0j * u

    def ddgamma(u):
        return 0j * u

    return BaseCurve.from_callables(gamma, dgamma, ddgamma, domain=(-half_length, half_length), metadata=metadata)


def _seed_point(ls: _LevelSet, R: float, tol: float):
    """Deterministic seed on the level set from a coarse grid probe."""
    n = 241
    xs = np.linspace(-R, R, n)
    ys = np.linspace(-R, R, n)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    F = ls.value(X, Y)
    sx = np.nonzero(np.sign(F[:-1, :]) * np.sign(F[1:, :]) < 0)
    sy = np.nonzero(np.sign(F[:, :-1]) * np.sign(F[:, 1:]) < 0)
    candidates = []
    for i, j in zip(*sx):
        candidates.append(((xs[i] + xs[i + 1]) / 2, ys[j]))
    for i, j in zip(*sy):
        candidates.append((xs[i], (ys[j] + ys[j + 1]) / 2))
    if candidates:
        # nearest to the origin, ties broken lexicographically for determinism
        candidates.sort(key=lambda p: (np.hypot(*p), p[0], p[1]))
        return ls.newton(*candidates[0], tol), False
    k = np.unravel_index(np.argmin(np.abs(F)), F.shape)
    scale = max(1.0, abs(ls.M), abs(ls.H))
    if abs(F[k]) <= 1e-6 * scale:
        x0, y0 = ls.newton(X[k], Y[k], tol)
        gx, gy = ls.grad(x0, y0)
        if np.hypot(gx, gy) < 1e-6:
            return (x0, y0), True
        return (x0, y0), False
    raise EmptyLevelSet(f"no zero of the level function found in [-{R}, {R}]^2")


def solve_r3(H: float, M: float, m: float, cfg: SolverConfig | None = None) -> BaseCurve:
    """Base curve whose pitch-m twizzler has mean curvature H.

    Traces the level set indexed by the treadmill constant M and inverts
    the treadmillsled.  Isolated level-set points are cylinders and return
    the circle of radius 1/|H| with the orientation matching the sign of H.
    Returns a curve parameterized by level-path arclength, with the solve
    summary in ``curve.metadata``.
    """
    cfg = cfg or SolverConfig()
    meta = {"spaceform": "euclidean3", "solver": "r3-level-set", "H": H, "M": M,
            "C": -np.pi * M, "m": m}
    if H == 0.0 and M == 0.0:
        meta["branch"] = "helicoid"
        return _helicoid_line(meta)
    # degenerate level set (single point): the cylinder whose h equals H
    if H != 0.0 and abs(1.0 + H * M) <= 1e-12 * max(1.0, abs(H * M)):
        meta["branch"] = "cylinder"
        meta["radius"] = 1.0 / abs(H)
        return _circle_curve(1.0 / abs(H), 1 if H > 0 else -1, meta)

    ls = _LevelSet(H, M, m)
    R = 10.0 * max(1.0, abs(M), (1.0 / abs(H)) if H != 0 else 1.0)
    (x0, y0), isolated = _seed_point(ls, R, cfg.tol_root)
    if isolated:
        meta["branch"] = "cylinder"
        meta["radius"] = float(np.hypot(x0, y0))
        return _circle_curve(meta["radius"], 1 if H > 0 else -1, meta)

    h = cfg.step

    def trace(x, y, direction):
        pts = []
        for _ in range(cfg.max_steps):
            tx, ty = ls.tangent(x, y)
            tx, ty = direction * tx, direction * ty
            # RK4 predictor on the unit tangent field, then Newton-correct
            k1 = (tx, ty)
            t2 = ls.tangent(x + h / 2 * k1[0], y + h / 2 * k1[1])
            k2 = (direction * t2[0], direction * t2[1])
            t3 = ls.tangent(x + h / 2 * k2[0], y + h / 2 * k2[1])
            k3 = (direction * t3[0], direction * t3[1])
            t4 = ls.tangent(x + h * k3[0], y + h * k3[1])
            k4 = (direction * t4[0], direction * t4[1])
            x = x + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            y = y + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            x, y = ls.newton(x, y, cfg.tol_root)
            pts.append((x, y))
            if abs(x) > R or abs(y) > R:
                break
            if len(pts) > 20 and np.hypot(x - x0, y - y0) < 0.6 * h:
                t_now = ls.tangent(x, y)
                t_start = ls.tangent(x0, y0)
                if direction * (t_now[0] * t_start[0] + t_now[1] * t_start[1]) > 0.9:
                    meta["closed"] = True
                    break
        return pts

    forward = trace(x0, y0, +1)
    if meta.get("closed"):
        pts = [(x0, y0)] + forward
    else:
        backward = trace(x0, y0, -1)
        pts = list(reversed(backward)) + [(x0, y0)] + forward
    pts = np.asarray(pts)
    if len(pts) < 8:
        raise EmptyLevelSet("level-set branch too short to reconstruct")
    x, y = pts[:, 0], pts[:, 1]
    sigma = h * np.arange(len(pts))

    phi_rate, v = ls.recon_rates(x, y)
    phi = cumulative_simpson(phi_rate, dx=h, initial=0.0)
    gamma = -np.exp(1j * phi) * (x - 1j * y)
    dgamma = v * np.exp(1j * phi)
    dv = fd_derivative(sigma, v)
    ddgamma = (dv + 1j * v * phi_rate) * np.exp(1j * phi)
    meta.setdefault("closed", False)
    meta["steps"] = int(len(pts))
    return BaseCurve.from_samples(sigma, gamma, dgamma, ddgamma, metadata=meta)


# ---------------------------------------------------------------------------
# S^3 / H^3: unit-speed constraint stepping
# ---------------------------------------------------------------------------


class _CurvedFlow:
    """Radial energy form of the conservation-constrained unit-speed march."""

    def __init__(self, sf: SpaceForm, H, C, m):
        self.sf = sf
        self.H, self.C, self.m = float(H), float(C), float(m)
        self.spherical = sf.curvature_sign > 0

    def _pieces(self, rho):
        if rho <= 1e-8:
            raise AxisTouch("|gamma| reached the rotation axis")
        r2 = rho * rho
        if self.spherical:
            f2 = 1.0 - r2
            if f2 <= 1e-12:
                raise AxisTouch("profile f reached zero (|gamma| -> 1)")
            df2 = -2.0 * rho
            K = self.C + self.H * np.pi * r2
            dK = 2.0 * self.H * np.pi * rho
            sign = 1.0
        else:
            f2 = 1.0 + r2
            df2 = 2.0 * rho
            K = self.C - self.H * np.pi * r2
            dK = -2.0 * self.H * np.pi * rho
            sign = -1.0
        G = r2 + self.m**2 * f2
        dG = 2.0 * rho + self.m**2 * df2
        return f2, df2, K, dK, G, dG, sign

    def angular(self, rho):
        """a = gamma'. i gamma solving the conservation equation at radius rho."""
        f2, _, K, _, G, _, sign = self._pieces(rho)
        a = sign * K * np.sqrt(G) / np.hypot(K, 2 * np.pi * self.m * f2)
        return a, f2

    def _a_and_da(self, rho):
        f2, df2, K, dK, G, dG, sign = self._pieces(rho)
        b = 2 * np.pi * self.m * f2
        db = 2 * np.pi * self.m * df2
        D = np.hypot(K, b)
        dD = (K * dK + b * db) / D
        sqrtG = np.sqrt(G)
        a = sign * K * sqrtG / D
        da = sign * (dK * sqrtG + K * dG / (2 * sqrtG) - K * sqrtG * dD / D) / D
        return a, da, f2, df2

    def energy(self, rho):
        """P(rho) = f^2 (1 - (a/rho)^2) = (rho')^2 along the march."""
        a, f2 = self.angular(rho)
        c2 = a / rho
        return f2 * (1.0 - c2 * c2)

    def denergy(self, rho):
        """Analytic dP/drho (cancellation-free near turning radii)."""
        a, da, f2, df2 = self._a_and_da(rho)
        r2 = rho * rho
        c22 = a * a / r2
        dc22 = 2.0 * a * da / r2 - 2.0 * a * a / (r2 * rho)
        return df2 * (1.0 - c22) - f2 * dc22

    def rates(self, y):
        """State derivative for y = (rho, rho', psi)."""
        rho, w, _psi = y
        a, _f2 = self.angular(rho)
        return np.array([w, 0.5 * self.denergy(rho), a / (rho * rho)])

    def rk4(self, y, hstep):
        k1 = self.rates(y)
        k2 = self.rates(y + hstep / 2 * k1)
        k3 = self.rates(y + hstep / 2 * k2)
        k4 = self.rates(y + hstep * k3)
        return y + hstep / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _solve_curved(sf: SpaceForm, H, C, m, start, cfg: SolverConfig) -> BaseCurve:
    cfg = cfg or SolverConfig()
    flow = _CurvedFlow(sf, H, C, m)
    gamma0 = complex(start)
    if sf.curvature_sign > 0 and not abs(gamma0) < 1.0:
        raise DomainError("S^3 start point needs |gamma| < 1")
    rho0 = abs(gamma0)
    P0 = flow.energy(rho0)
    if P0 < -cfg.turning_eps:
        raise NoRoot(
            f"conservation value C={C} incompatible at |gamma|={rho0:.6g}: "
            "|a| exceeds the kinematic bound"
        )
    branch = 1 if cfg.branch >= 0 else -1
    # float noise in P0 would inject a spurious sqrt-scale radial speed on
    # seeds lying exactly on a circular orbit (P has a double zero there)
    if P0 < 1e-13 * max(1.0, abs(C), abs(H)):
        P0 = 0.0
    y = np.array([rho0, branch * np.sqrt(P0), float(np.angle(gamma0))])
    h = cfg.step
    us, ys, a_vals = [], [], []
    u = 0.0
    terminated = "length_budget"
    for _ in range(cfg.max_steps):
        try:
            a_here, _ = flow.angular(y[0])  # also validates the point
            us.append(u)
            ys.append(y.copy())
            a_vals.append(a_here)
            y = flow.rk4(y, h)
        except AxisTouch:
            terminated = "axis_touch"
            break
        u += h

    if len(us) < 4:
        raise AxisTouch("march terminated before producing a usable arc", partial=None)
    us = np.asarray(us)
    ys = np.asarray(ys)
    rho, w, psi = ys[:, 0], ys[:, 1], ys[:, 2]
    a = np.asarray(a_vals)
    gs = rho * np.exp(1j * psi)
    dgs = (w + 1j * a / rho) * np.exp(1j * psi)
    ddgs = fd_derivative(us, dgs)
    flips = int(np.sum(np.diff(np.sign(w[np.abs(w) > 1e-13])) != 0)) if len(w) > 1 else 0
    meta = {
        "spaceform": sf.kind, "solver": f"{sf.kind}-constraint-stepping",
        "H": H, "C": C, "M": -C / np.pi, "m": m, "start": repr(start),
        "branch_flips": flips, "terminated": terminated, "steps": len(us),
    }
    return BaseCurve.from_samples(us, gs, dgs, ddgs, metadata=meta)


def solve_s3(H: float, C: float, m: float, start, cfg: SolverConfig | None = None) -> BaseCurve:
    """March a conservation-constrained unit-speed curve on S^3.

    ``start`` is the initial gamma (a radius on the positive real axis or a
    complex point with |gamma| < 1).  Reaching an axis (|gamma| -> 0 or
    f -> 0) ends the march and returns the curve up to that point, with
    ``metadata['terminated'] = 'axis_touch'``.
    """
    return _solve_curved(SPHERE3, H, C, m, start, cfg or SolverConfig())


def solve_h3(H: float, C: float, m: float, start, cfg: SolverConfig | None = None) -> BaseCurve:
    """March a conservation-constrained unit-speed curve on H^3 (Lorentz model)."""
    return _solve_curved(HYPERBOLIC3, H, C, m, start, cfg or SolverConfig())


def write_sidecar(curve: BaseCurve, path, extra=None):
    """Plain-text JSON sidecar with solver parameters and diagnostics."""
    payload = dict(curve.metadata)
    payload["domain"] = list(curve.domain)
    if extra:
        payload.update(extra)
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
