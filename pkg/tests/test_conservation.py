import numpy as np
import pytest

from conftest import circle_curve, line_curve, perturbed_circle, wobbly_curve
from twizzle.conservation import (
    FLUX_SIGN,
    check_constancy,
    conormal_closed_form,
    conserved_quantity,
    flux_conormal,
    flux_shaving,
    write_flux_csv,
)
from twizzle.errors import DomainError
from twizzle.spaceform import EUCLIDEAN3, HYPERBOLIC3, SPHERE3, inner
from twizzle.twizzler import Twizzler, helix_frame, partials


def test_conserved_quantity_helicoid_vanishes():
    t = Twizzler(EUCLIDEAN3, line_curve(), 1.0)
    u = np.linspace(0.2, 3.8, 11)
    assert np.max(np.abs(conserved_quantity(t, u, 0.0))) < 1e-15


def test_conserved_quantity_cylinder_value():
    # gamma = e^{iu}, m = 1: sqrt(g) = 1, gamma'.igamma = 1 => C = 2 pi - H pi
    t = Twizzler(EUCLIDEAN3, circle_curve(), 1.0)
    for H in (0.0, -0.5, 2.0):
        C = conserved_quantity(t, 0.7, H)
        assert abs(C - (2 * np.pi - H * np.pi)) < 1e-13


def test_conserved_quantity_s3_torus_value():
    for a in (0.5, 1 / np.sqrt(2), 0.8):
        t = Twizzler(SPHERE3, circle_curve(radius=a), 1.0)
        for H in (0.0, 0.7):
            C = conserved_quantity(t, 0.3, H)
            expected = 2 * np.pi * a * np.sqrt(1 - a**2) - H * np.pi * a**2
            assert abs(C - expected) < 1e-12


def test_conserved_quantity_h3_cylinder_value():
    # (a, b) = (1, sqrt 2), m = 1: C = -2 sqrt(2) pi + H pi
    t = Twizzler(HYPERBOLIC3, circle_curve(radius=1.0), 1.0)
    for H in (0.0, 1.5):
        C = conserved_quantity(t, 0.4, H)
        assert abs(C - (-2 * np.sqrt(2) * np.pi + H * np.pi)) < 1e-12


def test_linearity_in_H():
    u = 0.8
    t = Twizzler(EUCLIDEAN3, wobbly_curve("r3"), 1.2)
    g = t.base(np.asarray(u))
    d = conserved_quantity(t, u, 1.3) - conserved_quantity(t, u, -0.2)
    assert abs(d - (-np.pi * abs(g) ** 2 * 1.5)) < 1e-12
    ts = Twizzler(SPHERE3, wobbly_curve("s3"), 1.2)
    g = ts.base(np.asarray(u))
    d = conserved_quantity(ts, u, 1.3) - conserved_quantity(ts, u, -0.2)
    assert abs(d - (-np.pi * abs(g) ** 2 * 1.5)) < 1e-12
    th = Twizzler(HYPERBOLIC3, wobbly_curve("h3"), 1.2)
    g = th.base(np.asarray(u))
    d = conserved_quantity(th, u, 1.3) - conserved_quantity(th, u, -0.2)
    assert abs(d - (np.pi * abs(g) ** 2 * 1.5)) < 1e-12


def test_conserved_quantity_parameterization_invariant():
    c = wobbly_curve("r3")
    phi = lambda s: 0.1 + 0.9 * (s + 0.07 * np.sin(s))
    dphi = lambda s: 0.9 * (1 + 0.07 * np.cos(s))
    ddphi = lambda s: -0.9 * 0.07 * np.sin(s)
    c2 = c.reparameterized(phi, dphi, ddphi, domain=(0.05, 2.2))
    t1 = Twizzler(EUCLIDEAN3, c, 1.1)
    t2 = Twizzler(EUCLIDEAN3, c2, 1.1)
    s = np.linspace(0.1, 2.0, 15)
    assert np.max(np.abs(conserved_quantity(t1, phi(s), 0.8) - conserved_quantity(t2, s, 0.8))) < 1e-10


def test_flux_conormal_helicoid_zero():
    t = Twizzler(EUCLIDEAN3, line_curve(), 1.0)
    assert abs(flux_conormal(t, 1.7)) < 1e-13


def test_flux_conormal_cylinder_value():
    t = Twizzler(EUCLIDEAN3, circle_curve(), 1.0)
    assert abs(flux_conormal(t, 0.4) - (-2 * np.pi)) < 1e-12


def test_flux_conormal_integrand_v_independent():
    t = Twizzler(EUCLIDEAN3, wobbly_curve("r3"), 1.3)
    u0 = 0.9
    from twizzle.spaceform import killing_field

    fr = helix_frame(t, u0, 0.37)
    y = killing_field(EUCLIDEAN3, partials(t, u0, 0.37)["T"])
    speed = np.sqrt(inner(EUCLIDEAN3, fr.T_v, fr.T_v))
    pointwise = inner(EUCLIDEAN3, y, fr.eta) * speed
    assert abs(flux_conormal(t, u0) - 2 * np.pi * pointwise) < 1e-13


@pytest.mark.parametrize(
    "sf,kind", [(EUCLIDEAN3, "r3"), (SPHERE3, "s3"), (HYPERBOLIC3, "h3")]
)
def test_flux_conormal_matches_closed_form(sf, kind):
    t = Twizzler(sf, wobbly_curve(kind), 1.3)
    for u0 in (0.5, 1.2, 1.9):
        assert abs(flux_conormal(t, u0) - conormal_closed_form(t, u0)) < 1e-8


def test_flux_shaving_r3_values():
    t = Twizzler(EUCLIDEAN3, circle_curve(), 1.0)
    assert abs(flux_shaving(t, 0.2) + np.pi) < 1e-12
    tw = Twizzler(EUCLIDEAN3, wobbly_curve("r3"), 0.7)
    for u0 in (0.4, 1.5):
        r2 = abs(tw.base(np.asarray(u0))) ** 2
        assert abs(flux_shaving(tw, u0) + np.pi * r2) < 1e-9


def test_flux_shaving_zero_radius():
    c = line_curve(domain=(-1.0, 1.0))
    t = Twizzler(EUCLIDEAN3, c, 1.0)
    assert flux_shaving(t, 0.0) == 0.0


def test_flux_shaving_s3_empty_range():
    # gamma = 0 means f = 1: the shaving t-range collapses and the flux is 0
    c = line_curve(domain=(-0.5, 0.5))
    t = Twizzler(SPHERE3, c, 1.0)
    assert flux_shaving(t, 0.0) == 0.0


@pytest.mark.parametrize(
    "sf,kind", [(SPHERE3, "s3"), (HYPERBOLIC3, "h3")]
)
def test_flux_shaving_curved_matches_minus_pi_r2(sf, kind):
    t = Twizzler(sf, wobbly_curve(kind), 1.3)
    for u0 in (0.5, 1.7):
        r2 = abs(t.base(np.asarray(u0))) ** 2
        assert abs(flux_shaving(t, u0) + np.pi * r2) < 1e-8


@pytest.mark.parametrize(
    "sf,kind", [(EUCLIDEAN3, "r3"), (SPHERE3, "s3"), (HYPERBOLIC3, "h3")]
)
def test_cross_method_sign(sf, kind):
    t = Twizzler(sf, wobbly_curve(kind), 1.3)
    u = np.linspace(0.4, 1.9, 7)
    rep = check_constancy(t, 0.6, u)
    assert rep.flux_sign == FLUX_SIGN[sf.kind]
    assert rep.cross_discrepancy < 1e-7


def test_check_constancy_cylinder():
    t = Twizzler(EUCLIDEAN3, circle_curve(), 1.0)
    u = np.linspace(0.1, 6.0, 25)
    rep = check_constancy(t, 1.0, u)  # ccw unit cylinder: h = +1
    assert rep.max_deviation < 1e-9
    assert rep.is_cmc


def test_check_constancy_converse_detection():
    t = Twizzler(EUCLIDEAN3, perturbed_circle(0.1), 1.0)
    u = np.linspace(0.1, 6.1, 25)
    rep = check_constancy(t, 1.0, u)
    assert rep.omega_deviation >= 1e-3
    assert not rep.is_cmc


def test_check_constancy_single_sample():
    t = Twizzler(EUCLIDEAN3, circle_curve(), 1.0)
    rep = check_constancy(t, 0.5, [1.0])
    assert rep.max_deviation == 0.0


def test_check_constancy_needs_samples():
    t = Twizzler(EUCLIDEAN3, circle_curve(), 1.0)
    with pytest.raises(DomainError):
        check_constancy(t, 0.5, [])


def test_cmc_family_constancy_on_dense_grids():
    # cylinder, S^3 torus and H^3 cylinder: |C(u) - C(u0)| <= 1e-7 on 100 points
    cases = [
        (EUCLIDEAN3, circle_curve(), 1.0),
        (SPHERE3, circle_curve(radius=0.8), 0.7),
        (HYPERBOLIC3, circle_curve(radius=1.0), 1.3),
    ]
    for sf, c, H in cases:
        t = Twizzler(sf, c, 1.0)
        u = np.linspace(0.01, 2 * np.pi - 0.01, 100)
        C = conserved_quantity(t, u, H)
        assert np.max(np.abs(C - C[0])) <= 1e-7


def test_flux_csv_format(tmp_path):
    t = Twizzler(EUCLIDEAN3, circle_curve(), 1.0)
    rep = check_constancy(t, 1.0, np.linspace(0.2, 6.0, 5))
    out = tmp_path / "flux.csv"
    write_flux_csv(rep, out)
    lines = out.read_text().splitlines()
    assert lines[0] == "u,omega,closed_form,abs_diff"
    assert len(lines) == 7
    assert lines[-1].startswith("# median_C=")
    assert "max_dev=" in lines[-1]
