"""Planar C^2 curves, kinematic quantities, and the support parameterization.

Curves map a real interval into the plane, identified with C (a + ib).
Evaluation returns the 2-jet (gamma, gamma', gamma'') as complex arrays.
Closed-form curves wrap user callables; sampled curves interpolate dense
(gamma, gamma') data with cubic Hermite pieces, so gamma'' exists piecewise
(one-sided averaged at the nodes when not supplied).

Sign conventions used throughout the library:

* speed v = |gamma'|, unit tangent gamma'/v,
* curvature k = Im(conj(gamma') gamma'') / v^3, the standard signed planar
  curvature (equal to d(arg gamma')/ds); a counterclockwise circle has
  k = +1/r,
* normal n = (i/v) gamma'.

A strictly convex curve (k nonvanishing) admits the support form
gamma(theta) = (q + i q') e^{i theta} with q + q'' > 0, where theta is the
continuous lift of arg(-i gamma') and increases along the curve after the
orientation is normalized to k > 0.
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator

from .errors import ConvexityViolation, CurvatureVanishes, DomainError, TwizzleError

__all__ = [
    "BaseCurve",
    "SupportCurve",
    "Kinematics",
    "planar_dot",
    "kinematics",
    "arclength",
    "support_parameterize",
    "from_support",
    "write_curve_csv",
    "read_curve_csv",
]

_IMMERSION_PROBE = 513


def planar_dot(a, b):
    """Real planar dot product Re(a * conj(b)) under the C = R^2 identification."""
    return (np.asarray(a) * np.conj(np.asarray(b))).real


class BaseCurve:
    """Immersed planar curve with 2-jet access.

    Construct with :meth:`from_callables` or :meth:`from_samples`.
    Instances are immutable after construction and safe to share.
    """

    def __init__(self, domain, jet_fn, *, orientation=1, metadata=None, _immersion_check=True):
        a, b = float(domain[0]), float(domain[1])
        if not a < b:
            raise DomainError(f"empty domain ({a}, {b})")
        self.domain = (a, b)
        self._jet = jet_fn
        self.orientation = int(orientation)
        self.metadata = dict(metadata) if metadata else {}
        if _immersion_check:
            u = np.linspace(a, b, _IMMERSION_PROBE)
            _, dg, _ = self._jet(u)
            if np.min(np.abs(dg)) <= 1e-12:
                raise TwizzleError("curve is not immersed: |gamma'| vanishes at sample resolution")

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_callables(cls, gamma, dgamma, ddgamma=None, *, domain, orientation=1, metadata=None):
        """Wrap closed-form callables u -> complex.

        When ``ddgamma`` is omitted, second derivatives fall back to central
        finite differences of ``dgamma`` with one Richardson level.
        """

        def jet(u):
            u = np.asarray(u, dtype=float)
            g = np.asarray(gamma(u), dtype=complex)
            dg = np.asarray(dgamma(u), dtype=complex)
            if ddgamma is not None:
                ddg = np.asarray(ddgamma(u), dtype=complex)
            else:
                h = np.maximum(1e-5, 1e-5 * np.abs(u))
                d1 = (np.asarray(dgamma(u + h), dtype=complex) - np.asarray(dgamma(u - h), dtype=complex)) / (2 * h)
                h2 = h / 2
                d2 = (np.asarray(dgamma(u + h2), dtype=complex) - np.asarray(dgamma(u - h2), dtype=complex)) / (2 * h2)
                ddg = (4 * d2 - d1) / 3
            return g, dg, ddg

        return cls(domain, jet, orientation=orientation, metadata=metadata)

    @classmethod
    def from_samples(cls, u, g, dg, ddg=None, *, orientation=1, metadata=None):
        """Interpolate dense samples with C^1 cubic Hermite pieces.

        ``u`` must be strictly increasing.  With ``ddg`` supplied, gamma' is
        itself Hermite-interpolated from (dg, ddg), giving a C^1 gamma''.
        """
        u = np.asarray(u, dtype=float)
        if u.ndim != 1 or u.size < 2 or np.any(np.diff(u) <= 0):
            raise DomainError("sample grid must be strictly increasing with >= 2 nodes")
        g = np.asarray(g, dtype=complex)
        dg = np.asarray(dg, dtype=complex)
        sg = CubicHermiteSpline(u, np.stack([g.real, g.imag], axis=-1), np.stack([dg.real, dg.imag], axis=-1))
        if ddg is not None:
            ddg = np.asarray(ddg, dtype=complex)
            sdg = CubicHermiteSpline(u, np.stack([dg.real, dg.imag], axis=-1), np.stack([ddg.real, ddg.imag], axis=-1))
            dsdg = sdg.derivative()

            def jet(x):
                x = np.asarray(x, dtype=float)
                gg = sg(x)
                d = sdg(x)
                dd = dsdg(x)
                return (
                    gg[..., 0] + 1j * gg[..., 1],
                    d[..., 0] + 1j * d[..., 1],
                    dd[..., 0] + 1j * dd[..., 1],
                )

        else:
            dsg = sg.derivative()
            d2sg = sg.derivative(2)

            def jet(x):
                x = np.asarray(x, dtype=float)
                gg = sg(x)
                d = dsg(x)
                dd = d2sg(x)
                return (
                    gg[..., 0] + 1j * gg[..., 1],
                    d[..., 0] + 1j * d[..., 1],
                    dd[..., 0] + 1j * dd[..., 1],
                )

        return cls((u[0], u[-1]), jet, orientation=orientation, metadata=metadata)

    # -- evaluation ------------------------------------------------------

    def _require_inside(self, u, tol=1e-12):
        u = np.asarray(u, dtype=float)
        a, b = self.domain
        if np.any(u < a - tol) or np.any(u > b + tol):
            raise DomainError(f"parameter outside domain [{a}, {b}]")
        return np.clip(u, a, b)

    def jet(self, u):
        """(gamma, gamma', gamma'') at u (scalar or array)."""
        u = self._require_inside(u)
        return self._jet(u)

    def __call__(self, u):
        return self.jet(u)[0]

    def derivative(self, u):
        return self.jet(u)[1]

    def second_derivative(self, u):
        return self.jet(u)[2]

    # -- transforms -------------------------------------------------------

    def reversed(self):
        """Same point set traversed backwards."""
        a, b = self.domain

        def jet(u):
            g, dg, ddg = self._jet(a + b - np.asarray(u, dtype=float))
            return g, -dg, ddg

        return BaseCurve((a, b), jet, orientation=-self.orientation, metadata=self.metadata, _immersion_check=False)

    def rotated(self, alpha):
        """Curve multiplied by e^{i alpha}."""
        phase = np.exp(1j * float(alpha))

        def jet(u):
            g, dg, ddg = self._jet(np.asarray(u, dtype=float))
            return phase * g, phase * dg, phase * ddg

        return BaseCurve(self.domain, jet, orientation=self.orientation, metadata=self.metadata, _immersion_check=False)

    def reparameterized(self, phi, dphi, ddphi, domain):
        """Precompose with a smooth monotone map phi: domain -> original domain."""

        def jet(t):
            t = np.asarray(t, dtype=float)
            u = phi(t)
            g, dg, ddg = self._jet(u)
            du = dphi(t)
            return g, dg * du, ddg * du**2 + dg * ddphi(t)

        return BaseCurve(domain, jet, orientation=self.orientation, metadata=self.metadata, _immersion_check=False)


class Kinematics:
    """Pointwise kinematic data of a curve (arrays broadcast like the input)."""

    __slots__ = ("speed", "tangent", "curvature", "arclength")

    def __init__(self, speed, tangent, curvature, arclength):
        self.speed = speed
        self.tangent = tangent
        self.curvature = curvature
        self.arclength = arclength

    def __iter__(self):
        return iter((self.speed, self.tangent, self.curvature, self.arclength))


def _speed_func(curve):
    def f(x):
        return np.abs(curve.jet(x)[1])

    return f


def arclength(curve: BaseCurve, u, *, epsabs=1e-11) -> float:
    """Arc length from the left endpoint by adaptive quadrature of |gamma'|."""
    u = float(curve._require_inside(u))
    a = curve.domain[0]
    val, _err = quad(_speed_func(curve), a, u, epsabs=epsabs, limit=200)
    return val


def kinematics(curve: BaseCurve, u) -> Kinematics:
    """Speed, unit tangent, signed curvature and arc length at ``u``."""
    scalar = np.isscalar(u) or np.asarray(u).ndim == 0
    uu = np.atleast_1d(np.asarray(u, dtype=float))
    g, dg, ddg = curve.jet(uu)
    v = np.abs(dg)
    tangent = dg / v
    k = (np.conj(dg) * ddg).imag / v**3
    s = np.array([arclength(curve, x) for x in uu])
    if scalar:
        return Kinematics(float(v[0]), complex(tangent[0]), float(k[0]), float(s[0]))
    return Kinematics(v, tangent, k, s)


# ---------------------------------------------------------------------------
# support parameterization
# ---------------------------------------------------------------------------


class SupportCurve:
    """Strictly convex arc stored by its support function q(theta).

    Provides (q, q', q'') access either from callables or from a Hermite
    spline over a uniform theta grid.  Validity requires q + q'' > 0.
    """

    def __init__(self, domain, q_fn, *, grid=None, check=True):
        a, b = float(domain[0]), float(domain[1])
        if not a < b:
            raise DomainError(f"empty theta domain ({a}, {b})")
        self.domain = (a, b)
        self._q = q_fn
        self.grid = grid
        if check:
            th = np.linspace(a, b, 513)
            q, _, qpp = self._q(th)
            if np.min(q + qpp) <= 0:
                raise ConvexityViolation("q + q'' <= 0 on the domain")

    @classmethod
    def from_callables(cls, q, qp, qpp, *, domain):
        def f(th):
            th = np.asarray(th, dtype=float)
            return (
                np.asarray(q(th), dtype=float),
                np.asarray(qp(th), dtype=float),
                np.asarray(qpp(th), dtype=float),
            )

        return cls(domain, f)

    @classmethod
    def from_samples(cls, theta, q, qp=None, *, check=True):
        theta = np.asarray(theta, dtype=float)
        q = np.asarray(q, dtype=float)
        if qp is not None:
            spline = CubicHermiteSpline(theta, q, np.asarray(qp, dtype=float))
        else:
            spline = PchipInterpolator(theta, q)
        d1 = spline.derivative()
        d2 = spline.derivative(2)

        def f(th):
            th = np.asarray(th, dtype=float)
            return spline(th), d1(th), d2(th)

        return cls((theta[0], theta[-1]), f, grid=theta, check=check)

    def evaluate(self, theta):
        theta = np.asarray(theta, dtype=float)
        a, b = self.domain
        if np.any(theta < a - 1e-12) or np.any(theta > b + 1e-12):
            raise DomainError(f"theta outside [{a}, {b}]")
        return self._q(np.clip(theta, a, b))

    def third_derivative(self, theta, h=1e-5):
        """q''' by central differences of q'' (used for gamma'' of support curves)."""
        theta = np.asarray(theta, dtype=float)
        a, b = self.domain
        hm = np.minimum(h, np.minimum(theta - a, b - theta) / 2)
        hm = np.maximum(hm, 1e-9)
        _, _, up = self._q(np.clip(theta + hm, a, b))
        _, _, dn = self._q(np.clip(theta - hm, a, b))
        return (up - dn) / (2 * hm)


def support_parameterize(curve: BaseCurve, *, samples: int = 2001) -> SupportCurve:
    """Compute the support function of a strictly convex curve.

    The curve is reoriented to positive curvature if necessary; the support
    angle theta is the continuous lift of arg(-i gamma'/v), accumulated by
    integrating d(theta) = k v du instead of unwrapping, which avoids branch
    cuts.  Returns q over theta(I) such that (q + i q') e^{i theta}
    reproduces the input curve as a point set.
    """
    a, b = curve.domain
    u = np.linspace(a, b, samples)
    if samples < 3:
        raise DomainError("degenerate arc: need at least 3 samples")
    g, dg, ddg = curve.jet(u)
    v = np.abs(dg)
    k = (np.conj(dg) * ddg).imag / v**3
    if np.min(np.abs(k)) <= 1e-12:
        bad = u[int(np.argmin(np.abs(k)))]
        raise CurvatureVanishes(bad)
    if k[0] < 0:
        return support_parameterize(curve.reversed(), samples=samples)

    # cumulative normal angle: d(theta)/du = k * v > 0, integrated through a
    # Hermite spline of the rate (no arg-unwrapping, no branch cuts)
    rate = k * v
    theta0 = float(np.angle(-1j * dg[0] / v[0]))
    anti = CubicHermiteSpline(u, rate, np.gradient(rate, u)).antiderivative()
    theta = theta0 + anti(u) - anti(u[0])

    # resample onto a uniform theta grid through the inverse map u(theta)
    u_of_theta = PchipInterpolator(theta, u)
    th_uniform = np.linspace(theta[0], theta[-1], samples)
    uu = u_of_theta(th_uniform)
    gg, dgg, _ = curve.jet(uu)
    ee = np.exp(1j * th_uniform)
    q = planar_dot(gg, ee)
    qp = planar_dot(gg, 1j * ee)
    return SupportCurve.from_samples(th_uniform, q, qp)


def from_support(sc: SupportCurve, *, check: bool = True) -> BaseCurve:
    """Curve gamma(theta) = (q + i q') e^{i theta} of a support function.

    The 2-jet follows by differentiation: gamma' = i (q + q'') e^{i theta}
    (so the speed is q + q'') and gamma'' = (i (q' + q''') - (q + q''))
    e^{i theta}.
    """
    if check:
        th = np.linspace(sc.domain[0], sc.domain[1], 513)
        q, _, qpp = sc.evaluate(th)
        w = q + qpp
        if np.min(w) <= 0:
            raise ConvexityViolation("q + q'' <= 0: not a valid support function")

    def jet(theta):
        theta = np.asarray(theta, dtype=float)
        q, qp, qpp = sc.evaluate(theta)
        qppp = sc.third_derivative(theta)
        e = np.exp(1j * theta)
        g = (q + 1j * qp) * e
        dg = 1j * (q + qpp) * e
        ddg = (1j * (qp + qppp) - (q + qpp)) * e
        return g, dg, ddg

    return BaseCurve(sc.domain, jet, metadata={"source": "support"})


# ---------------------------------------------------------------------------
# CSV interface: header u,gx,gy,dgx,dgy[,ddgx,ddgy]
# ---------------------------------------------------------------------------


def write_curve_csv(path, curve: BaseCurve, *, samples: int = 513, second_derivatives: bool = True):
    """Write curve samples in the shared CSV format (>= 15 significant digits)."""
    u = np.linspace(curve.domain[0], curve.domain[1], samples)
    g, dg, ddg = curve.jet(u)
    cols = [u, g.real, g.imag, dg.real, dg.imag]
    header = "u,gx,gy,dgx,dgy"
    if second_derivatives:
        cols += [ddg.real, ddg.imag]
        header += ",ddgx,ddgy"
    data = np.column_stack(cols)
    with open(path, "w", encoding="ascii") as fh:
        fh.write(header + "\n")
        for row in data:
            fh.write(",".join(format(x, ".17g") for x in row) + "\n")


def read_curve_csv(path) -> BaseCurve:
    """Read the shared curve CSV format into a sampled BaseCurve."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip() for line in fh if line.strip() and not line.startswith("#")]
    expected = ["u", "gx", "gy", "dgx", "dgy"]
    if header[:5] != expected:
        raise DomainError(f"bad curve CSV header {header!r}")
    if not rows:
        raise DomainError("curve CSV has no samples")
    data = np.array([[float(x) for x in r.split(",")] for r in rows])
    u = data[:, 0]
    g = data[:, 1] + 1j * data[:, 2]
    dg = data[:, 3] + 1j * data[:, 4]
    ddg = None
    if len(header) >= 7 and data.shape[1] >= 7:
        ddg = data[:, 5] + 1j * data[:, 6]
    return BaseCurve.from_samples(u, g, dg, ddg, metadata={"source": str(path)})
