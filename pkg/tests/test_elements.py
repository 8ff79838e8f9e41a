import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

import secular3bp as s


def bisect_kepler(l, e):
    """Independent oracle: bisection on E - e sin E - l = 0."""
    lo, hi = l - e - 1e-9, l + e + 1e-9
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid - e * math.sin(mid) - l > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


class TestKepler:
    def test_zero_mean_anomaly(self):
        assert s.solve_kepler(0.0, 0.3) == 0.0

    def test_symmetry_at_pi(self):
        assert_allclose(s.solve_kepler(math.pi, 0.7), math.pi, atol=1e-13)

    def test_against_bisection(self):
        ref = bisect_kepler(1.0, 0.3)
        assert round(ref, 3) == 1.288
        assert abs(s.solve_kepler(1.0, 0.3) - ref) < 1e-12

    def test_residual_grid(self):
        ls = np.linspace(-3 * math.pi, 3 * math.pi, 101)
        for e in (0.0, 0.1, 0.5, 0.9, 0.99):
            E = s.solve_kepler(ls, e)
            assert np.max(np.abs(E - e * np.sin(E) - ls)) < 1e-13

    def test_continuity_across_periods(self):
        e = 0.6
        base = s.solve_kepler(1.3, e)
        for k in (-2, -1, 1, 3):
            assert_allclose(s.solve_kepler(1.3 + 2 * math.pi * k, e),
                            base + 2 * math.pi * k, rtol=0, atol=1e-12)

    def test_domain_error(self):
        with pytest.raises(s.DomainError):
            s.solve_kepler(1.0, 1.0)
        with pytest.raises(s.DomainError):
            s.solve_kepler(1.0, -0.1)


class TestPositions:
    def test_periapsis(self):
        p = s.perifocal_position(0.1, 0.3, 0.0)
        assert_allclose((p.xp, p.yp), (0.07, 0.0), atol=1e-15)

    def test_quarter_anomaly(self):
        p = s.perifocal_position(0.1, 0.3, math.pi / 2)
        assert_allclose(p.xp, -0.03, atol=1e-15)
        assert_allclose(p.yp, 0.1 * math.sqrt(0.91), atol=1e-15)
        assert_allclose(p.yp, 0.095394, atol=1e-6)

    def test_circular(self):
        for th in np.linspace(0, 2 * math.pi, 17):
            p = s.perifocal_position(1.0, 0.0, th)
            assert_allclose((p.xp, p.yp), (math.cos(th), math.sin(th)), atol=1e-15)

    def test_ellipse_identity(self):
        a, e = 0.2, 0.55
        for E in np.linspace(0, 2 * math.pi, 23):
            p = s.perifocal_position(a, e, E)
            val = (p.xp / a + e) ** 2 + (p.yp / (a * math.sqrt(1 - e * e))) ** 2
            assert_allclose(val, 1.0, atol=1e-14)

    def test_planet_positions(self):
        assert_allclose(s.planet_position(0.0, 0.3), (0.7, 0.0), atol=1e-15)
        assert_allclose(s.planet_position(math.pi, 0.3), (-1.3, 0.0), atol=1e-15)
        x, y = s.planet_position(math.pi / 2, 0.3)
        assert_allclose((x, y), (-0.3, math.sqrt(0.91)), atol=1e-15)


class TestRotation:
    def test_identity_when_planar_aligned(self):
        p = s.PerifocalPosition(0.3, -0.2)
        r = s.rotate_to_inertial(p, 0.0, 0.0, 0.0)
        assert_allclose((r.x, r.y, r.z), (0.3, -0.2, 0.0), atol=1e-16)

    def test_planar_rotation_by_theta(self):
        # at i = 0 only omega + Omega matters and the map is a plane rotation
        rng = np.random.default_rng(0)
        for _ in range(20):
            om, Om = rng.uniform(-3, 3, 2)
            th = om + Om
            m = s.rotation_matrix(om, Om, 0.0)
            expect = np.array([[math.cos(th), -math.sin(th)],
                               [math.sin(th), math.cos(th)],
                               [0.0, 0.0]])
            assert_allclose(m, expect, atol=1e-14)

    def test_aligned_node_simplification(self):
        # omega = -Omega collapses the matrix to the one-angle form
        rng = np.random.default_rng(1)
        for _ in range(30):
            Om = rng.uniform(-3, 3)
            inc = rng.uniform(0, 3)
            cO, sO, ci, si = math.cos(Om), math.sin(Om), math.cos(inc), math.sin(inc)
            expect = np.array([
                [1 - (1 - ci) * sO * sO, cO * sO * (1 - ci)],
                [cO * sO * (1 - ci), 1 - (1 - ci) * cO * cO],
                [-si * sO, si * cO],
            ])
            assert_allclose(s.rotation_matrix(-Om, Om, inc), expect, atol=1e-14)

    def test_norm_preserved(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            p = s.PerifocalPosition(*rng.uniform(-1, 1, 2))
            om, Om, inc = rng.uniform(-3, 3, 3)
            r = s.rotate_to_inertial(p, om, Om, inc)
            assert abs(r.x**2 + r.y**2 + r.z**2 - (p.xp**2 + p.yp**2)) < 1e-14

    def test_z_zero_iff_planar(self):
        p = s.PerifocalPosition(0.4, 0.3)
        assert s.rotate_to_inertial(p, 0.7, -0.2, 0.0).z == 0.0
        assert abs(s.rotate_to_inertial(p, 0.7, -0.2, 0.3).z) > 1e-3


class TestDelaunay:
    def test_circular_planar(self):
        el = s.OrbitalElements(a=0.1, e=0.0, i=0.0, omega=0.0, Omega=0.0, l=0.0)
        d = s.delaunay_from_elements(el)
        assert_allclose((d.L, d.G, d.H), (math.sqrt(0.1),) * 3, atol=1e-16)

    def test_reference_angular_momentum(self):
        el = s.OrbitalElements(a=0.1, e=0.041367, i=0.0, omega=0.0, Omega=0.0, l=0.0)
        d = s.delaunay_from_elements(el)
        assert_allclose(d.G, math.sqrt(0.1) * math.sqrt(1 - 0.041367**2), rtol=1e-15)

    def test_roundtrip(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            el = s.OrbitalElements(
                a=rng.uniform(0.01, 0.9), e=rng.uniform(0, 0.95),
                i=rng.uniform(0.01, 3.0), omega=rng.uniform(-3, 3),
                Omega=rng.uniform(-3, 3), l=rng.uniform(-3, 3))
            back = s.elements_from_delaunay(s.delaunay_from_elements(el))
            for name in ("a", "e", "i", "omega", "Omega", "l"):
                assert abs(getattr(back, name) - getattr(el, name)) < 1e-14

    def test_retrograde_allowed_parabolic_rejected(self):
        el = s.OrbitalElements(a=0.1, e=0.2, i=math.pi, omega=0.0, Omega=0.0, l=0.0)
        d = s.delaunay_from_elements(el)
        assert_allclose(d.H, -d.G, rtol=1e-12)
        with pytest.raises(s.DomainError):
            s.elements_from_delaunay(s.DelaunayState(L=0.3, G=0.0, H=0.0, l=0, g=0, h=0))


class TestPoincare:
    def test_planar_pair_vanishes(self):
        el = s.OrbitalElements(a=0.2, e=0.3, i=0.0, omega=0.5, Omega=0.0, l=1.0)
        p = s.poincare_from_delaunay(s.delaunay_from_elements(el))
        assert p.p3 == 0.0 and p.q3 == 0.0 and p.planar_degenerate

    def test_circular_pair_vanishes(self):
        el = s.OrbitalElements(a=0.2, e=0.0, i=0.4, omega=0.0, Omega=0.3, l=1.0)
        p = s.poincare_from_delaunay(s.delaunay_from_elements(el))
        assert p.p2 == 0.0 and p.q2 == 0.0 and p.circular_degenerate

    def test_amplitude_identity(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            el = s.OrbitalElements(
                a=rng.uniform(0.01, 0.9), e=rng.uniform(0.05, 0.9),
                i=rng.uniform(0.05, 2.5), omega=rng.uniform(-3, 3),
                Omega=rng.uniform(-3, 3), l=rng.uniform(-3, 3))
            d = s.delaunay_from_elements(el)
            p = s.poincare_from_delaunay(d)
            assert_allclose(p.p3**2 + p.q3**2, 2 * d.G * (1 - math.cos(el.i)), rtol=1e-12)
            assert_allclose(p.p2**2 + p.q2**2, 2 * (d.L - d.G), rtol=1e-12)

    def test_roundtrip(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            el = s.OrbitalElements(
                a=rng.uniform(0.01, 0.9), e=rng.uniform(0.05, 0.9),
                i=rng.uniform(0.05, 2.5), omega=rng.uniform(-3, 3),
                Omega=rng.uniform(-3, 3), l=rng.uniform(-3, 3))
            d = s.delaunay_from_elements(el)
            back = s.delaunay_from_poincare(s.poincare_from_delaunay(d))
            assert abs(back.L - d.L) < 1e-13
            assert abs(back.G - d.G) < 1e-13
            assert abs(back.H - d.H) < 1e-13
            for ang in ("l", "g", "h"):
                diff = s.reduce_angle(getattr(back, ang) - getattr(d, ang))
                assert abs(diff) < 1e-12


class TestShell:
    def test_small_inclination_limit(self):
        p3, q3 = s.shell_p3q3(1e-8, 0.3, 0.3)
        assert math.hypot(p3, q3) < 1e-3

    def test_zero_node(self):
        p3, q3 = s.shell_p3q3(0.5, 0.0, 0.3, s.Normalization.HALF_POINCARE)
        assert q3 == 0.0
        assert_allclose(p3, math.sqrt(0.3 * (1 - math.cos(0.5))), rtol=1e-15)

    def test_radius_identity(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            inc, Om, G = rng.uniform(0.05, 3.0), rng.uniform(0, 7), rng.uniform(0.1, 1)
            p3, q3 = s.shell_p3q3(inc, Om, G, s.Normalization.HALF_POINCARE)
            assert_allclose(p3**2 + q3**2, G * (1 - math.cos(inc)), rtol=1e-13)
            p3, q3 = s.shell_p3q3(inc, Om, G, s.Normalization.POINCARE)
            assert_allclose(p3**2 + q3**2, 2 * G * (1 - math.cos(inc)), rtol=1e-13)

    def test_degenerate_rejected(self):
        with pytest.raises(s.DomainError):
            s.shell_p3q3(0.0, 0.0, 0.3)
