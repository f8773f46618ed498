"""Ambient geometry of the three simply-connected spaceforms.

Each spaceform is handled through its standard flat embedding:

* Euclidean 3-space as itself,
* the 3-sphere as the unit sphere of R^4,
* hyperbolic 3-space as the upper sheet of <x, x> = 1 for the quadratic
  form diag(-1, -1, -1, +1) (Lorentz model; the induced Riemannian metric
  is the negative of the restricted form).

R^4 is identified with C x C through (Re z, Im z, Re w, Im w); in R^3 the
first two coordinates are identified with C the same way.  The screw-motion
Killing field of each spaceform is fixed once and for all:

* R^3: the vertical translation field e3,
* S^3: (z, w) -> (0, i w),
* H^3: (z, w) -> (0, swap(w)), i.e. (x3, x4) -> (x4, x3).

All functions are pure and accept broadcast numpy arrays whose last axis is
the ambient dimension.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import KindMismatch

__all__ = [
    "SpaceForm",
    "EUCLIDEAN3",
    "SPHERE3",
    "HYPERBOLIC3",
    "from_name",
    "inner",
    "killing_field",
    "project_tangent",
    "boost",
    "validate_point",
]

POINT_TOL = 1e-9


@dataclass(frozen=True)
class SpaceForm:
    """Descriptor of one ambient geometry.

    ``signature`` holds the diagonal weights of the ambient bilinear form;
    ``curvature_sign`` is 0 / +1 / -1 for flat / spherical / hyperbolic.
    """

    kind: str
    signature: tuple[float, ...]
    curvature_sign: int

    @property
    def dim(self) -> int:
        return len(self.signature)

    @property
    def is_flat(self) -> bool:
        return self.curvature_sign == 0

    @property
    def metric_sign(self) -> float:
        """Sign relating the ambient form to the Riemannian metric on the surface.

        +1 where the restricted form is the metric (R^3, S^3); -1 for the
        Lorentz model, whose induced metric is the negative of the form.
        """
        return -1.0 if self.curvature_sign < 0 else 1.0

    def __repr__(self) -> str:  # keep reprs short in test output
        return f"SpaceForm({self.kind})"


EUCLIDEAN3 = SpaceForm("euclidean3", (1.0, 1.0, 1.0), 0)
SPHERE3 = SpaceForm("sphere3", (1.0, 1.0, 1.0, 1.0), +1)
HYPERBOLIC3 = SpaceForm("hyperbolic3", (-1.0, -1.0, -1.0, 1.0), -1)

_BY_NAME = {
    "r3": EUCLIDEAN3,
    "euclidean3": EUCLIDEAN3,
    "s3": SPHERE3,
    "sphere3": SPHERE3,
    "h3": HYPERBOLIC3,
    "hyperbolic3": HYPERBOLIC3,
}


def from_name(name: str) -> SpaceForm:
    try:
        return _BY_NAME[name.lower()]
    except KeyError:
        raise KindMismatch(f"unknown spaceform {name!r}") from None


def _check_dim(sf: SpaceForm, *vectors) -> None:
    for v in vectors:
        if np.shape(v)[-1] != sf.dim:
            raise KindMismatch(
                f"{sf.kind} expects {sf.dim}-component vectors, got shape {np.shape(v)}"
            )


def inner(sf: SpaceForm, a, b):
    """Ambient bilinear form with the spaceform's signature weights."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    _check_dim(sf, a, b)
    w = np.asarray(sf.signature)
    return np.sum(w * a * b, axis=-1)


def killing_field(sf: SpaceForm, p):
    """Screw-motion generator evaluated at ambient point(s) ``p``."""
    p = np.asarray(p, dtype=float)
    _check_dim(sf, p)
    out = np.zeros_like(p)
    if sf is EUCLIDEAN3 or sf.kind == "euclidean3":
        out[..., 2] = 1.0
    elif sf.curvature_sign > 0:
        # (z, w) -> (0, i w): rotate the (x3, x4) pair by a quarter turn
        out[..., 2] = -p[..., 3]
        out[..., 3] = p[..., 2]
    else:
        # (z, w) -> (0, swap(w)): boost generator on the (x3, x4) pair
        out[..., 2] = p[..., 3]
        out[..., 3] = p[..., 2]
    return out


def project_tangent(sf: SpaceForm, p, v):
    """Project ``v`` onto the tangent space at ``p`` (identity in R^3)."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_dim(sf, p, v)
    if sf.is_flat:
        return v.copy()
    coef = inner(sf, v, p) / inner(sf, p, p)
    return v - coef[..., None] * p


def boost(m: float, v):
    """One-parameter SO(1,1) subgroup [[cosh mv, sinh mv], [sinh mv, cosh mv]]."""
    arg = m * np.asarray(v, dtype=float)
    c, s = np.cosh(arg), np.sinh(arg)
    return np.stack(
        [np.stack([c, s], axis=-1), np.stack([s, c], axis=-1)], axis=-2
    )


def constraint_value(sf: SpaceForm, p):
    """<p, p> under the spaceform's form (should be 1 for curved points)."""
    return inner(sf, p, p)


def validate_point(sf: SpaceForm, p, tol: float = POINT_TOL):
    """Return ``p`` renormalized onto the constraint surface.

    Points are pulled back onto <p, p> = 1 rather than rejected, which
    absorbs integrator drift; genuinely invalid points (wrong sheet,
    non-positive form value in H^3, near-zero norm in S^3) raise.
    """
    p = np.asarray(p, dtype=float)
    _check_dim(sf, p)
    if sf.is_flat:
        return p.copy()
    q = constraint_value(sf, p)
    if sf.curvature_sign < 0:
        if np.any(q <= tol) or np.any(p[..., 3] <= 0):
            raise KindMismatch("not a point of the hyperboloid's upper sheet")
    else:
        if np.any(q <= tol):
            raise KindMismatch("cannot renormalize a near-zero R^4 vector onto S^3")
    return p / np.sqrt(q)[..., None]
