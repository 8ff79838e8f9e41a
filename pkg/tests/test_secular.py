import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

import secular3bp as s
from secular3bp import Regime, SecularParams

A_REF, EJ_REF = 0.1, 0.3
E_STAR_REF = 0.041367  # aligned equilibrium eccentricity at the reference setup


class TestRbarSeries:
    def test_reference_level(self):
        level = -s.rbar_series(A_REF, E_STAR_REF, EJ_REF, 0.0)
        assert abs(level - 1.002872548) < 1e-7

    def test_unperturbed_limit(self):
        assert_allclose(s.rbar_series(1e-12, 0.3, 0.5, 1.0), -1.0, atol=1e-12)

    def test_direct_substitution(self):
        assert_allclose(s.rbar_series(0.1, 0.0, 0.0, 0.0), -1.0025, rtol=1e-15)

    def test_derivative_is_consistent(self):
        # analytic e-derivative vs central differences
        for e in (0.05, 0.3, 0.7):
            h = 1e-6
            fd = (s.rbar_series(0.1, e + h, 0.3, 0.7)
                  - s.rbar_series(0.1, e - h, 0.3, 0.7)) / (2 * h)
            assert_allclose(s.rbar_series_e_derivative(0.1, e, 0.3, 0.7), fd,
                            rtol=1e-8)


class TestRbarQuadrature:
    def test_matches_series_at_reference(self):
        # truncation gap at a = 0.1 is fourth order; measured 2.24e-5
        diff = abs(s.rbar_quadrature(A_REF, E_STAR_REF, EJ_REF, 0.0)
                   - s.rbar_series(A_REF, E_STAR_REF, EJ_REF, 0.0))
        assert diff < 3e-5

    def test_fourth_order_gap(self):
        errs = [abs(s.rbar_quadrature(a, 0.2, 0.3, 0.7)
                    - s.rbar_series(a, 0.2, 0.3, 0.7)) for a in (0.05, 0.1)]
        assert errs[1] / errs[0] >= 12.0

    def test_circular_circular_laplace_value(self):
        # e = e_J = 0: the average reduces to the ring-ring interaction,
        # -(1 + a^2/4 + 9 a^4/64 + ...)
        a = 0.1
        val = s.rbar_quadrature(a, 0.0, 0.0, 0.0)
        series = -(1 + a**2 / 4 + 9 * a**4 / 64 + 25 * a**6 / 256)
        assert abs(val - series) < 2e-9


class TestEquilibrium:
    def test_reference_value(self):
        e_star = s.equilibrium_eccentricity(A_REF, EJ_REF)
        assert abs(e_star - 0.041367) < 5e-6

    def test_circular_perturber(self):
        assert s.equilibrium_eccentricity(0.1, 0.0) == 0.0

    def test_smaller_ratio(self):
        assert abs(s.equilibrium_eccentricity(0.05, 0.3) - 0.0206) < 5e-5

    def test_first_order_condition(self):
        for a, e_j in ((0.1, 0.3), (0.05, 0.5), (0.2, 0.2)):
            e_star = s.equilibrium_eccentricity(a, e_j)
            assert abs(s.rbar_series_e_derivative(a, e_star, e_j, 0.0)) < 1e-12

    def test_no_equilibrium(self):
        with pytest.raises(s.NoEquilibriumError):
            s.equilibrium_eccentricity(0.9, 0.9)


class TestSecularParams:
    def test_inconsistent_g_rejected(self):
        with pytest.raises(s.DomainError):
            s.SecularParams(a=0.1, e=0.2, e_j=0.3, theta=0.0, inc=0.1, G=0.5)

    def test_make(self):
        p = SecularParams.make(0.1, 0.2, 0.3, theta=1.0, inc=0.5)
        assert_allclose(p.G, math.sqrt(0.1 * (1 - 0.04)), rtol=1e-15)


class TestApsidalCoefficients:
    def test_circular_body(self):
        p = SecularParams.make(0.1, 0.0, 0.3, theta=0.0, inc=0.8)
        qf = s.coeffs_apsidal(p)
        expect = math.sin(0.8) ** 2 * 0.01 / (
            4 * p.G * (1 - math.cos(0.8)) * (1 - 0.09) ** 1.5)
        assert_allclose(qf.a_bar, expect, rtol=1e-14)
        assert qf.a_bar > 0

    def test_arithmetic_point(self):
        p = SecularParams.make(0.1, 0.0, 0.0, theta=0.0, inc=math.pi / 2)
        qf = s.coeffs_apsidal(p)
        assert_allclose(qf.a_bar, 0.01 / (4 * math.sqrt(0.1)), rtol=1e-12)
        assert abs(qf.a_bar - 0.0079057) < 1e-7

    def test_cross_term_identically_zero(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            p = SecularParams.make(rng.uniform(0.01, 0.3), rng.uniform(0, 0.9),
                                   rng.uniform(0, 0.8), theta=0.0,
                                   inc=rng.uniform(0.05, 1.5))
            assert s.coeffs_apsidal(p).b_bar == 0.0

    def test_regime_errors(self):
        with pytest.raises(s.DomainError):
            s.coeffs_apsidal(SecularParams.make(0.1, 0.1, 0.3, theta=0.3, inc=0.5))
        with pytest.raises(s.DomainError):
            s.coeffs_apsidal(SecularParams.make(0.1, 0.1, 0.3, theta=0.0, inc=0.0))


class TestSmallInclinationCoefficients:
    def test_quarter_theta_leading_order(self):
        p = SecularParams.make(0.01, 0.2, 0.3, theta=math.pi / 2, inc=0.0)
        qf = s.coeffs_small_inclination(p)
        lead = 3 * (1 + 4 * 0.04) * 1e-4 / (4 * p.G * (1 - 0.09) ** 1.5)
        # octupole term of a_bar carries cos(theta) and vanishes here
        assert_allclose(qf.a_bar, lead, rtol=1e-12)

    def test_cross_term_vanishes_on_axes(self):
        for theta in (0.0, math.pi / 2):
            p = SecularParams.make(0.1, 0.2, 0.0, theta=theta, inc=0.0)
            # e_j = 0 also kills the octupole, isolating the leading term
            assert abs(s.coeffs_small_inclination(p).b_bar) < 1e-18

    def test_determinant_cross_check(self):
        # the transcribed determinant agrees with Abar Cbar - Bbar^2 except
        # for its sixth-order term, which enters with the opposite sign
        p = SecularParams.make(0.1, 0.1, 0.3, theta=1.0, inc=0.0)
        qf = s.coeffs_small_inclination(p)
        _, _, t6 = s.det_small_inclination_terms(p)
        gap = s.det_small_inclination(p) - qf.det
        assert_allclose(gap, 2 * t6, rtol=1e-9)


class TestGeneralCoefficients:
    def test_reduction_to_apsidal(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            p = SecularParams.make(rng.uniform(0.01, 0.3), rng.uniform(1e-4, 0.9),
                                   rng.uniform(0.0, 0.8), theta=0.0,
                                   inc=rng.uniform(0.05, 1.5))
            qg, qa = s.coeffs_general(p), s.coeffs_apsidal(p)
            scale = max(abs(qa.a_bar), abs(qa.c_bar))
            assert abs(qg.a_bar - qa.a_bar) <= 1e-14 * scale
            assert abs(qg.b_bar - qa.b_bar) <= 1e-14 * scale
            assert abs(qg.c_bar - qa.c_bar) <= 1e-14 * scale

    def test_cross_term_zero_at_aligned(self):
        p = SecularParams.make(0.1, 0.3, 0.4, theta=0.0, inc=0.7)
        assert s.coeffs_general(p).b_bar == 0.0

    def test_degenerate_inclination(self):
        with pytest.raises(s.DomainError):
            s.coeffs_general(SecularParams.make(0.1, 0.1, 0.3, theta=0.5, inc=0.0))


class TestDeterminants:
    def test_leading_term_theta_free(self):
        vals = []
        for theta in np.linspace(0, 2 * math.pi, 17):
            p = SecularParams.make(0.1, 0.35, 0.4, theta=theta, inc=0.7)
            vals.append(s.det_general_terms(p)[0])
        vals = np.array(vals)
        assert np.max(np.abs(vals - vals[0])) <= 1e-14 * abs(vals[0])

    def test_leading_term_factorization(self):
        p = SecularParams.make(0.1, 0.35, 0.4, theta=0.9, inc=0.7)
        t4 = s.det_general_terms(p)[0]
        e, ci = 0.35, math.cos(0.7)
        expect = ((1 - e * e) * (1 + 4 * e * e) * (1 + ci) ** 2 * 0.1**4
                  / (16 * (1 - 0.16) ** 3 * p.G**2))
        assert_allclose(t4, expect, rtol=1e-14)

    def test_leading_polynomial_positive(self):
        for e in np.linspace(0, 0.99, 50):
            assert 1 + 3 * e * e - 4 * e**4 > 0

    def test_general_cross_check(self):
        p = SecularParams.make(0.1, 0.3, 0.4, theta=0.8, inc=0.7)
        qf = s.coeffs_general(p)
        _, _, t6 = s.det_general_terms(p)
        gap = s.det_general(p) - qf.det
        assert_allclose(gap, 2 * t6, rtol=1e-9)


class TestVerdicts:
    def test_identity_form(self):
        v = s.stability_verdict(s.QuadraticForm2(1.0, 0.0, 1.0, Regime.GENERAL))
        assert v.positive_definite and v.det_value == 1.0

    def test_indefinite_form(self):
        v = s.stability_verdict(s.QuadraticForm2(1.0, 2.0, 1.0, Regime.GENERAL))
        assert not v.positive_definite and v.det_value == -3.0

    def test_small_inclination_wide_box(self):
        # the regime consistent with the oracle stays positive definite
        # over the whole wide box
        rng = np.random.default_rng(2)
        for _ in range(2000):
            p = SecularParams.make(rng.uniform(1e-6, 0.1), rng.uniform(1e-9, 0.9),
                                   rng.uniform(0.0, 0.6),
                                   theta=rng.uniform(0, 2 * math.pi),
                                   inc=rng.uniform(1e-9, math.pi / 2))
            assert s.stability_verdict(s.coeffs_small_inclination(p)).positive_definite

    def test_finite_inclination_forms_on_reference_box(self):
        # general and aligned closed forms hold on the reference domain
        # (orbit-family eccentricities, inclinations away from zero)
        rng = np.random.default_rng(3)
        for _ in range(2000):
            e = rng.uniform(1e-6, 0.1)
            inc = rng.uniform(0.3, 1.4)
            theta = rng.uniform(0, 2 * math.pi)
            pg = SecularParams.make(0.1, e, 0.3, theta=theta, inc=inc)
            pa = SecularParams.make(0.1, e, 0.3, theta=0.0, inc=inc)
            assert s.stability_verdict(s.coeffs_general(pg)).positive_definite
            assert s.stability_verdict(s.coeffs_apsidal(pa)).positive_definite
