import numpy as np
import pytest

from conftest import (
    circle_curve,
    fd_first_partials,
    fd_mean_curvature,
    fd_second_partials,
    line_curve,
    wobbly_curve,
)
from twizzle.conservation import conserved_quantity
from twizzle.curve import BaseCurve, from_support, planar_dot, support_parameterize
from twizzle.errors import DegenerateMetric, DomainError
from twizzle.spaceform import EUCLIDEAN3, HYPERBOLIC3, SPHERE3, inner
from twizzle.twizzler import (
    Twizzler,
    chart3,
    fundamental_forms,
    helix_frame,
    immerse,
    partials,
    sample_mesh,
    write_obj,
    write_vertices_csv,
)


def h3_circle(a=1.0):
    return circle_curve(radius=a)


def test_immerse_r3_example():
    t = Twizzler(EUCLIDEAN3, circle_curve(), 1.0)
    p = immerse(t, 0.0, np.pi / 2)
    assert np.allclose(p, [0.0, 1.0, np.pi / 2], atol=1e-15)


def test_immerse_v0_is_base_curve():
    c = wobbly_curve("r3")
    t = Twizzler(EUCLIDEAN3, c, 0.7)
    u = np.linspace(0.2, 2.0, 17)
    pts = immerse(t, u, 0.0)
    g = c(u)
    assert np.allclose(pts[:, 0] + 1j * pts[:, 1], g, atol=1e-15)
    assert np.allclose(pts[:, 2], 0.0)


@pytest.mark.parametrize(
    "sf,curve",
    [(SPHERE3, wobbly_curve("s3")), (HYPERBOLIC3, wobbly_curve("h3"))],
)
def test_immerse_satisfies_constraint(sf, curve, rng):
    t = Twizzler(sf, curve, 1.3)
    u = rng.uniform(0.2, 2.1, size=25)
    v = rng.uniform(-3.0, 3.0, size=25)
    p = immerse(t, u, v)
    assert np.max(np.abs(inner(sf, p, p) - 1.0)) < 1e-12


def test_h3_cylinder_constraint():
    a, b = 1.0, np.sqrt(2.0)
    t = Twizzler(HYPERBOLIC3, h3_circle(a), 1.0)
    p = immerse(t, 0.8, 1.9)
    assert abs(inner(HYPERBOLIC3, p, p) - 1.0) < 1e-14
    assert abs(p[2] ** 2 - (b * np.sinh(1.9)) ** 2) < 1e-12


def test_pitch_must_be_positive():
    with pytest.raises(DomainError):
        Twizzler(EUCLIDEAN3, circle_curve(), 0.0)


def test_s3_radius_bound():
    with pytest.raises(DomainError):
        Twizzler(SPHERE3, circle_curve(radius=1.2), 1.0)


def test_cylinder_forms():
    t = Twizzler(EUCLIDEAN3, circle_curve(), 1.0)
    fd = fundamental_forms(t, 0.9)
    assert abs(fd.sqrt_g - 1.0) < 1e-14
    assert abs(abs(fd.h) - 1.0) < 1e-12
    # orientation convention: counterclockwise circle -> h = +1/r
    assert fd.h > 0


def test_helicoid_minimal():
    t = Twizzler(EUCLIDEAN3, line_curve(), 1.0)
    u = np.linspace(0.2, 3.8, 21)
    h = fundamental_forms(t, u)["h"]
    assert np.max(np.abs(h)) < 1e-14


def test_clifford_torus_minimal():
    a = 1 / np.sqrt(2)
    t = Twizzler(SPHERE3, circle_curve(radius=a), 1.0)
    u = np.linspace(0.0, 2 * np.pi, 11)
    h = fundamental_forms(t, u)["h"]
    assert np.max(np.abs(h)) < 1e-12


@pytest.mark.parametrize(
    "sf,kind", [(EUCLIDEAN3, "r3"), (SPHERE3, "s3"), (HYPERBOLIC3, "h3")]
)
def test_mean_curvature_against_fd_oracle(sf, kind):
    t = Twizzler(sf, wobbly_curve(kind), 1.3)
    for u in (0.5, 1.0, 1.7):
        h = fundamental_forms(t, u).h
        h_fd = fd_mean_curvature(t, u)
        assert abs(h - h_fd) < 1e-6


@pytest.mark.parametrize(
    "sf,kind", [(EUCLIDEAN3, "r3"), (SPHERE3, "s3"), (HYPERBOLIC3, "h3")]
)
def test_partials_against_finite_differences(sf, kind):
    t = Twizzler(sf, wobbly_curve(kind), 0.9)
    u, v = 1.1, 0.6
    p = partials(t, u, v)
    Tu, Tv = fd_first_partials(t, u, v)
    assert np.max(np.abs(p["Tu"] - Tu)) < 1e-7
    assert np.max(np.abs(p["Tv"] - Tv)) < 1e-7
    Tuu, Tuv, Tvv = fd_second_partials(t, u, v)
    assert np.max(np.abs(p["Tuu"] - Tuu)) < 1e-6
    assert np.max(np.abs(p["Tuv"] - Tuv)) < 1e-6
    assert np.max(np.abs(p["Tvv"] - Tvv)) < 1e-6


def test_h_is_screw_invariant(rng):
    for sf, kind in ((EUCLIDEAN3, "r3"), (SPHERE3, "s3"), (HYPERBOLIC3, "h3")):
        t = Twizzler(sf, wobbly_curve(kind), 1.3)
        u = rng.uniform(0.3, 2.0, size=7)
        h0 = fundamental_forms(t, u, 0.0)["h"]
        h1 = fundamental_forms(t, u, rng.uniform(-2, 2))["h"]
        assert np.max(np.abs(h0 - h1)) < 1e-9


def test_reparameterization_leaves_geometry():
    c = wobbly_curve("r3")
    phi = lambda s: 0.1 + (s + 0.08 * np.sin(s)) * 0.9
    dphi = lambda s: 0.9 * (1 + 0.08 * np.cos(s))
    ddphi = lambda s: -0.9 * 0.08 * np.sin(s)
    c2 = c.reparameterized(phi, dphi, ddphi, domain=(0.05, 2.2))
    t1 = Twizzler(EUCLIDEAN3, c, 1.1)
    t2 = Twizzler(EUCLIDEAN3, c2, 1.1)
    s = np.linspace(0.1, 2.0, 9)
    p1 = immerse(t1, phi(s), 0.77)
    p2 = immerse(t2, s, 0.77)
    assert np.max(np.abs(p1 - p2)) < 1e-12
    h1 = fundamental_forms(t1, phi(s))["h"]
    h2 = fundamental_forms(t2, s)["h"]
    assert np.max(np.abs(h1 - h2)) < 1e-8


def test_sqrt_g_identity_r3():
    c = wobbly_curve("r3")
    t = Twizzler(EUCLIDEAN3, c, 1.7)
    u = np.linspace(0.2, 2.1, 33)
    fd = fundamental_forms(t, u)
    g, dg, _ = c.jet(u)
    expected = np.sqrt(
        np.abs(dg) ** 2 * (np.abs(g) ** 2 + 1.7**2) - planar_dot(dg, 1j * g) ** 2
    )
    assert np.max(np.abs(fd["sqrt_g"] - expected)) < 1e-10


def test_normal_orthogonality():
    for sf, kind in ((SPHERE3, "s3"), (HYPERBOLIC3, "h3")):
        t = Twizzler(sf, wobbly_curve(kind), 1.3)
        u = np.linspace(0.3, 2.0, 9)
        fd = fundamental_forms(t, u)
        p = partials(t, u, 0.0)
        assert np.max(np.abs(inner(sf, fd["nu"], p["Tu"]))) < 1e-9
        assert np.max(np.abs(inner(sf, fd["nu"], p["Tv"]))) < 1e-9
        assert np.max(np.abs(inner(sf, fd["nu"], p["T"]))) < 1e-9
        assert np.max(np.abs(np.abs(inner(sf, fd["nu"], fd["nu"])) - 1.0)) < 1e-12


def test_conservation_rate_identity():
    """d/du C(u; H=0) = phi(u) h(u) with phi from the closed-form H-term.

    This is the orientation pin for the normal: the conserved quantity is
    constant exactly on surfaces whose trace mean curvature equals the
    formula's H.
    """
    eps = 1e-6
    for sf, kind, beta in (
        (EUCLIDEAN3, "r3", -1.0),
        (SPHERE3, "s3", -1.0),
        (HYPERBOLIC3, "h3", 1.0),
    ):
        c = wobbly_curve(kind)
        t = Twizzler(sf, c, 1.3)
        u = np.linspace(0.4, 1.9, 13)
        h = fundamental_forms(t, u)["h"]
        dA = (conserved_quantity(t, u + eps, 0.0) - conserved_quantity(t, u - eps, 0.0)) / (2 * eps)
        g, dg, _ = c.jet(u)
        dr2 = 2 * planar_dot(g, dg)
        target = -beta * np.pi * dr2 * h
        scale = max(np.max(np.abs(dA)), 1.0)
        assert np.max(np.abs(dA - target)) / scale < 1e-8


def test_helix_frame_cylinder_closed_form():
    t = Twizzler(EUCLIDEAN3, circle_curve(), 1.0)
    fr = helix_frame(t, 0.3, 1.2)
    # eta . e3 = -(sqrt(|g|^2+m^2)/sqrt(g)) * (g'.ig) m / (|g|^2+m^2) = -1/sqrt(2)
    assert abs(fr.eta[2] + 1 / np.sqrt(2)) < 1e-12


def test_helix_frame_helicoid_zero():
    t = Twizzler(EUCLIDEAN3, line_curve(), 1.0)
    fr = helix_frame(t, 1.5, 0.4)
    assert abs(fr.eta[2]) < 1e-14


def test_helix_frame_orthonormal(rng):
    for sf, kind in ((EUCLIDEAN3, "r3"), (SPHERE3, "s3"), (HYPERBOLIC3, "h3")):
        t = Twizzler(sf, wobbly_curve(kind), 1.3)
        u0 = rng.uniform(0.4, 1.9)
        v0 = rng.uniform(-2, 2)
        fr = helix_frame(t, u0, v0)
        sgn = sf.metric_sign
        assert abs(sgn * inner(sf, fr.eta, fr.T_v)) < 1e-10
        assert abs(sgn * inner(sf, fr.eta, fr.eta) - 1.0) < 1e-12
        # eta lies in span{T_u, T_v}: solve the 2x2 system and compare
        E = inner(sf, fr.T_u, fr.T_u)
        F = inner(sf, fr.T_u, fr.T_v)
        G = inner(sf, fr.T_v, fr.T_v)
        a = inner(sf, fr.eta, fr.T_u)
        b = inner(sf, fr.eta, fr.T_v)
        coef = np.linalg.solve([[E, F], [F, G]], [a, b])
        recon = coef[0] * fr.T_u + coef[1] * fr.T_v
        assert np.max(np.abs(recon - fr.eta)) < 1e-9


def test_mesh_minimal_counts():
    t = Twizzler(EUCLIDEAN3, circle_curve(), 1.0)
    mesh = sample_mesh(t, (0.0, 1.0), (0.0, 1.0), 2, 2)
    assert len(mesh.vertices) == 4
    assert len(mesh.faces) == 2


def test_mesh_s3_on_sphere():
    t = Twizzler(SPHERE3, circle_curve(radius=0.6), 1.0)
    mesh = sample_mesh(t, (0.0, 2 * np.pi), (0.0, 2 * np.pi), 24, 24)
    norms = np.linalg.norm(mesh.vertices, axis=1)
    assert np.max(np.abs(norms - 1.0)) < 1e-12


def test_mesh_cylinder_axis_distance():
    t = Twizzler(EUCLIDEAN3, circle_curve(), 1.0)
    mesh = sample_mesh(t, (0.0, 2 * np.pi), (0.0, 2 * np.pi), 16, 16)
    d = np.hypot(mesh.vertices[:, 0], mesh.vertices[:, 1])
    assert np.max(np.abs(d - 1.0)) < 1e-12


def test_mesh_sample_validation():
    t = Twizzler(EUCLIDEAN3, circle_curve(), 1.0)
    with pytest.raises(DomainError):
        sample_mesh(t, (0.0, 1.0), (0.0, 1.0), 1, 8)
    with pytest.raises(DomainError):
        sample_mesh(t, (0.0, 9.0), (0.0, 1.0), 4, 4)


def test_obj_export(tmp_path):
    t = Twizzler(SPHERE3, circle_curve(radius=0.6), 1.0)
    mesh = sample_mesh(t, (0.0, 2 * np.pi), (0.0, 2 * np.pi), 6, 6)
    obj = tmp_path / "m.obj"
    write_obj(mesh, obj)
    lines = obj.read_text().splitlines()
    v_lines = [l for l in lines if l.startswith("v ")]
    f_lines = [l for l in lines if l.startswith("f ")]
    assert len(v_lines) == 36
    assert len(f_lines) == 2 * 5 * 5
    idx = np.array([[int(x) for x in l.split()[1:]] for l in f_lines])
    assert idx.min() >= 1 and idx.max() <= 36
    # chart is stereographic from (0,0,0,-1)
    pts = chart3(mesh)
    assert np.allclose(pts, mesh.vertices[:, :3] / (1 + mesh.vertices[:, 3])[:, None])
    raw = tmp_path / "m.4d.csv"
    write_vertices_csv(mesh, raw)
    assert raw.read_text().splitlines()[0] == "x1,x2,x3,x4"


def test_degenerate_immersion_rejected():
    # |gamma| = 1 everywhere in S^3 collapses the surface onto a curve
    with pytest.raises(DegenerateMetric):
        Twizzler(SPHERE3, circle_curve(radius=1.0), 1.0)
