"""Helicoidal (twizzler) surfaces: immersion, fundamental forms, meshes.

A twizzler applies the screw motion of pitch m to a planar base curve:

* R^3:  T(u, v) = e^{iv} gamma(u) + m v e3,
* S^3:  T(u, v) = (e^{iv} gamma(u), e^{imv} f(u)),   f = sqrt(1 - |gamma|^2),
* H^3:  T(u, v) = (e^{iv} gamma(u), B_m(v) i f(u)),  f = sqrt(1 + |gamma|^2),

with B_m the SO(1,1) boost.  Mean curvature is reported in the trace
convention, h = (G L - 2 F M + E N) / (E G - F^2), with all brackets taken
in the spaceform's ambient form (the double sign of the Lorentz model
cancels between numerator and denominator, so the same expression is valid
in all three geometries).

Normal orientation is fixed once and for all so that the conservation-rate
identity d/du C(u; H) = phi(u) (h(u) - H) holds with phi carrying the sign
of the closed-form flux law; concretely the screw surface over a
counterclockwise circle has h = +1/r (normal toward the axis).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curve import BaseCurve, planar_dot
from .errors import DegenerateMetric, DomainError, TwizzleError
from .spaceform import EUCLIDEAN3, SpaceForm, inner

__all__ = [
    "Twizzler",
    "FundamentalData",
    "FrameAtPoint",
    "Mesh",
    "immerse",
    "partials",
    "fundamental_forms",
    "helix_frame",
    "sample_mesh",
    "write_obj",
    "write_vertices_csv",
]

_METRIC_TOL = 1e-12


def _det3(m):
    return np.linalg.det(m)


def _cross4(a, b, c):
    """Vector d with d . z = det[a; b; c; z] (Euclidean dot) for all z."""
    m = np.stack([a, b, c], axis=-2)
    d = np.empty(a.shape, dtype=float)
    cols = np.arange(4)
    signs = (-1.0, 1.0, -1.0, 1.0)
    for j in range(4):
        keep = cols[cols != j]
        d[..., j] = signs[j] * _det3(m[..., keep])
    return d


@dataclass(frozen=True)
class Twizzler:
    """Screw-motion surface over a base curve with pitch m > 0."""

    spaceform: SpaceForm
    base: BaseCurve
    pitch: float
    axis_touch: bool = field(init=False, default=False)

    def __post_init__(self):
        if not self.pitch > 0:
            raise DomainError("pitch m must be positive")
        a, b = self.base.domain
        probe = np.linspace(a, b, 257)
        g, dg, _ = self.base.jet(probe)
        if self.spaceform.curvature_sign > 0:
            r = np.abs(g)
            if np.max(r) > 1.0 + 1e-12:
                raise DomainError("S^3 base curve must satisfy |gamma| <= 1")
            object.__setattr__(self, "axis_touch", bool(np.max(r) > 1.0 - 1e-7))
        # immersion check away from the very endpoints (profile derivatives
        # may degenerate exactly on an axis touch)
        inset = np.linspace(a + (b - a) * 1e-3, b - (b - a) * 1e-3, 129)
        with np.errstate(invalid="ignore"):
            E, F, G = _first_form(self, inset)
            det = E * G - F * F
        if not np.all(np.isfinite(det)) or not np.all(det > 0):
            raise DegenerateMetric("immersion degenerates on the domain")

    @property
    def domain(self):
        return self.base.domain


def _profile(t: Twizzler, g, dg, ddg):
    """Profile f and derivatives for the curved spaceforms."""
    r2 = planar_dot(g, g)
    if t.spaceform.curvature_sign > 0:
        f2 = 1.0 - r2
        f = np.sqrt(np.maximum(f2, 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            fp = -planar_dot(g, dg) / f
            fpp = -(planar_dot(dg, dg) + planar_dot(g, ddg) + fp * fp) / f
    else:
        f = np.sqrt(1.0 + r2)
        fp = planar_dot(g, dg) / f
        fpp = (planar_dot(dg, dg) + planar_dot(g, ddg) - fp * fp) / f
    return f, fp, fpp


def _assemble_r3(z, z3):
    return np.stack([np.real(z), np.imag(z), z3], axis=-1)


def _assemble4(z, w_re, w_im):
    return np.stack([np.real(z), np.imag(z), w_re, w_im], axis=-1)


def partials(t: Twizzler, u, v):
    """Position and first/second parameter derivatives at (u, v).

    Returns a dict with keys T, Tu, Tv, Tuu, Tuv, Tvv, each an array whose
    last axis is the ambient dimension; u and v broadcast together.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    u, v = np.broadcast_arrays(u, v)
    g, dg, ddg = t.base.jet(u)
    m = t.pitch
    E = np.exp(1j * v)
    sf = t.spaceform
    if sf.is_flat:
        zero = np.zeros_like(u)
        return {
            "T": _assemble_r3(E * g, m * v),
            "Tu": _assemble_r3(E * dg, zero),
            "Tv": _assemble_r3(1j * E * g, np.full_like(u, m)),
            "Tuu": _assemble_r3(E * ddg, zero),
            "Tuv": _assemble_r3(1j * E * dg, zero),
            "Tvv": _assemble_r3(-E * g, zero),
        }
    f, fp, fpp = _profile(t, g, dg, ddg)
    if sf.curvature_sign > 0:
        W = np.exp(1j * m * v)
        return {
            "T": _assemble4(E * g, np.real(W * f), np.imag(W * f)),
            "Tu": _assemble4(E * dg, np.real(W * fp), np.imag(W * fp)),
            "Tv": _assemble4(1j * E * g, np.real(1j * m * W * f), np.imag(1j * m * W * f)),
            "Tuu": _assemble4(E * ddg, np.real(W * fpp), np.imag(W * fpp)),
            "Tuv": _assemble4(1j * E * dg, np.real(1j * m * W * fp), np.imag(1j * m * W * fp)),
            "Tvv": _assemble4(-E * g, np.real(-(m**2) * W * f), np.imag(-(m**2) * W * f)),
        }
    S, C = np.sinh(m * v), np.cosh(m * v)
    return {
        "T": _assemble4(E * g, f * S, f * C),
        "Tu": _assemble4(E * dg, fp * S, fp * C),
        "Tv": _assemble4(1j * E * g, m * f * C, m * f * S),
        "Tuu": _assemble4(E * ddg, fpp * S, fpp * C),
        "Tuv": _assemble4(1j * E * dg, m * fp * C, m * fp * S),
        "Tvv": _assemble4(-E * g, m**2 * f * S, m**2 * f * C),
    }


def immerse(t: Twizzler, u, v):
    """Point(s) of the surface; curved cases satisfy the constraint to 1e-12."""
    u = np.asarray(u, dtype=float)
    t.base._require_inside(u)
    if t.spaceform.curvature_sign > 0:
        g = t.base(u)
        if np.any(np.abs(g) > 1.0 + 1e-12):
            raise DomainError("S^3 immersion needs |gamma| <= 1")
    return partials(t, u, v)["T"]


def _first_form(t: Twizzler, u, v=0.0):
    p = partials(t, u, v)
    sf = t.spaceform
    E = inner(sf, p["Tu"], p["Tu"])
    F = inner(sf, p["Tu"], p["Tv"])
    G = inner(sf, p["Tv"], p["Tv"])
    return E, F, G


def _normal_raw(t: Twizzler, p):
    """Un-normalized normal with the library's fixed orientation."""
    sf = t.spaceform
    if sf.is_flat:
        return np.cross(p["Tv"], p["Tu"])
    d = _cross4(p["T"], p["Tv"], p["Tu"])
    if sf.curvature_sign < 0:
        # raise the index: <Q d, z>_Q = d . z
        d = d * np.asarray(sf.signature)
    return d


@dataclass(frozen=True)
class FundamentalData:
    """First and second fundamental form data at one base parameter."""

    E: float
    F: float
    G: float
    L: float
    M2: float
    N2: float
    sqrt_g: float
    h: float
    nu: np.ndarray


@dataclass(frozen=True)
class FrameAtPoint:
    """Tangent frame along a helix: (T_u, T_v, unit conormal, unit normal)."""

    T_u: np.ndarray
    T_v: np.ndarray
    eta: np.ndarray
    nu: np.ndarray


def fundamental_forms(t: Twizzler, u, v=0.0):
    """Fundamental forms, area density and mean curvature at base parameter u.

    By screw symmetry h does not depend on v; v is accepted to let callers
    verify that.  Scalar u returns FundamentalData; array u returns a dict
    of arrays (keys as the dataclass fields).
    """
    scalar = np.isscalar(u) or np.asarray(u).ndim == 0
    uu = np.atleast_1d(np.asarray(u, dtype=float))
    p = partials(t, uu, v)
    sf = t.spaceform
    E = inner(sf, p["Tu"], p["Tu"])
    F = inner(sf, p["Tu"], p["Tv"])
    G = inner(sf, p["Tv"], p["Tv"])
    det = E * G - F * F
    if np.any(det <= _METRIC_TOL**2):
        raise DegenerateMetric("sqrt(g) <= 1e-12 at evaluation point")
    sqrt_g = np.sqrt(det)
    raw = _normal_raw(t, p)
    norm2 = inner(sf, raw, raw)
    scale = np.sqrt(np.abs(norm2))
    if np.any(scale <= _METRIC_TOL):
        raise DegenerateMetric("normal direction degenerates")
    nu = raw / scale[..., None]
    L = inner(sf, p["Tuu"], nu)
    M2 = inner(sf, p["Tuv"], nu)
    N2 = inner(sf, p["Tvv"], nu)
    h = (G * L - 2.0 * F * M2 + E * N2) / det
    if scalar:
        return FundamentalData(
            float(E[0]), float(F[0]), float(G[0]), float(L[0]), float(M2[0]),
            float(N2[0]), float(sqrt_g[0]), float(h[0]), nu[0],
        )
    return {
        "E": E, "F": F, "G": G, "L": L, "M2": M2, "N2": N2,
        "sqrt_g": sqrt_g, "h": h, "nu": nu,
    }


def mean_curvature(t: Twizzler, u, v=0.0):
    """Convenience accessor for h(u)."""
    out = fundamental_forms(t, u, v)
    return out.h if isinstance(out, FundamentalData) else out["h"]


def helix_frame(t: Twizzler, u0, v) -> FrameAtPoint:
    """Frame along the helix through u0: conormal eta points to increasing u.

    eta is the Riemannian-unit vector in span{T_u, T_v} orthogonal to the
    helix direction T_v; it is the outward conormal of the subsurface lying
    on the increasing-u side.
    """
    p = partials(t, np.asarray(u0, dtype=float), np.asarray(v, dtype=float))
    sf = t.spaceform
    sgn = sf.metric_sign
    E = sgn * inner(sf, p["Tu"], p["Tu"])
    F = sgn * inner(sf, p["Tu"], p["Tv"])
    G = sgn * inner(sf, p["Tv"], p["Tv"])
    det = E * G - F * F
    if np.any(det <= _METRIC_TOL**2):
        raise DegenerateMetric("sqrt(g) <= 1e-12 along the helix")
    eta = p["Tu"] - (F / G)[..., None] * p["Tv"]
    eta = eta / np.sqrt(det / G)[..., None]
    raw = _normal_raw(t, p)
    nu = raw / np.sqrt(np.abs(inner(sf, raw, raw)))[..., None]
    return FrameAtPoint(T_u=p["Tu"], T_v=p["Tv"], eta=eta, nu=nu)


# ---------------------------------------------------------------------------
# meshes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Mesh:
    """Triangulated sample of a twizzler (vertices in ambient coordinates)."""

    spaceform: SpaceForm
    vertices: np.ndarray
    faces: np.ndarray
    normals: np.ndarray

    def __post_init__(self):
        if self.faces.size and (self.faces.min() < 0 or self.faces.max() >= len(self.vertices)):
            raise DomainError("face indices out of range")


def sample_mesh(t: Twizzler, u_range, v_range, nu_samples: int, nv_samples: int) -> Mesh:
    """Sample a (nu x nv) grid and triangulate it.

    Curved-case vertices are renormalized onto the constraint surface.
    Raises DegenerateMetric if the immersion degenerates inside the range.
    """
    if nu_samples < 2 or nv_samples < 2:
        raise DomainError("need at least 2 samples per direction")
    a, b = float(u_range[0]), float(u_range[1])
    c, d = float(v_range[0]), float(v_range[1])
    lo, hi = t.base.domain
    if not (lo - 1e-12 <= a < b <= hi + 1e-12):
        raise DomainError("u-range outside the base curve domain")
    uu = np.linspace(a, b, nu_samples)
    vv = np.linspace(c, d, nv_samples)
    U, V = np.meshgrid(uu, vv, indexing="ij")
    p = partials(t, U, V)
    sf = t.spaceform
    E = inner(sf, p["Tu"], p["Tu"])
    F = inner(sf, p["Tu"], p["Tv"])
    G = inner(sf, p["Tv"], p["Tv"])
    if np.any(E * G - F * F <= _METRIC_TOL**2):
        raise DegenerateMetric("degenerate immersion inside the sampled range")
    verts = p["T"]
    if not sf.is_flat:
        q = inner(sf, verts, verts)
        verts = verts / np.sqrt(q)[..., None]
    raw = _normal_raw(t, p)
    normals = raw / np.sqrt(np.abs(inner(sf, raw, raw)))[..., None]

    verts = verts.reshape(-1, sf.dim)
    normals = normals.reshape(-1, sf.dim)
    faces = []
    for i in range(nu_samples - 1):
        for j in range(nv_samples - 1):
            k00 = i * nv_samples + j
            k01 = k00 + 1
            k10 = k00 + nv_samples
            k11 = k10 + 1
            faces.append((k00, k10, k11))
            faces.append((k00, k11, k01))
    faces = np.asarray(faces, dtype=int)

    # zero-area triangles mean the grid collapsed somewhere
    e1 = verts[faces[:, 1]] - verts[faces[:, 0]]
    e2 = verts[faces[:, 2]] - verts[faces[:, 0]]
    gram = (
        np.sum(e1 * e1, axis=-1) * np.sum(e2 * e2, axis=-1)
        - np.sum(e1 * e2, axis=-1) ** 2
    )
    if np.any(gram <= 1e-28):
        raise DegenerateMetric("mesh contains degenerate triangles")
    return Mesh(spaceform=sf, vertices=verts, faces=faces, normals=normals)


def chart3(mesh: Mesh) -> np.ndarray:
    """3D chart of the vertices: identity (R^3), stereographic from
    (0,0,0,-1) (S^3), or the Poincare-ball map x / (1 + x4) (H^3)."""
    v = mesh.vertices
    if mesh.spaceform.is_flat:
        return v.copy()
    return v[:, :3] / (1.0 + v[:, 3])[:, None]


def write_obj(mesh: Mesh, path):
    """Write `v x y z` / `f i j k` lines (1-based indices) of the 3D chart."""
    pts = chart3(mesh)
    with open(path, "w", encoding="ascii") as fh:
        for x, y, z in pts:
            fh.write(f"v {x:.17g} {y:.17g} {z:.17g}\n")
        for i, j, k in mesh.faces:
            fh.write(f"f {i + 1} {j + 1} {k + 1}\n")


def write_vertices_csv(mesh: Mesh, path):
    """Raw ambient vertex dump (4 columns for the curved spaceforms)."""
    dim = mesh.spaceform.dim
    header = ",".join(f"x{i + 1}" for i in range(dim))
    with open(path, "w", encoding="ascii") as fh:
        fh.write(header + "\n")
        for row in mesh.vertices:
            fh.write(",".join(format(x, ".17g") for x in row) + "\n")
