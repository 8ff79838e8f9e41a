"""Truncated secular potential and averaged quadratic stability forms.

The planar secular potential rbar_series is the double-averaged
interaction function truncated at third order in the semi-major-axis
ratio.  The three coeffs_* operations evaluate transcribed closed-form
coefficient triples (Abar, Bbar, Cbar) of the averaged quadratic form in
the out-of-plane pair (p3, q3), one per regime:

* apsidal            -- aligned configuration (theta = 0), finite inclination;
* small-inclination  -- general theta, inclination treated as infinitesimal;
* general            -- general theta, finite inclination.

All triples are kept exactly as transcribed, including terms the
brute-force averaging oracle (oracle module) flags as inconsistent;
discrepancies are surfaced by the validation audit, never patched here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .averaging import AveragedValue, QuadratureGrid, double_average
from .elements import InertialPosition, Normalization
from .errors import DomainError, NoEquilibriumError
from .potential import KernelKind, m_terms, truncated_kernel


class Regime(str, Enum):
    APSIDAL = "apsidal"
    SMALL_INCLINATION = "small-inclination"
    GENERAL = "general"


@dataclass(frozen=True)
class SecularParams:
    """Parameter point (a, e, e_j, theta, inc) with consistent G = sqrt(a(1-e^2))."""

    a: float
    e: float
    e_j: float
    theta: float
    inc: float
    G: float

    def __post_init__(self):
        if not 0.0 < self.a < 1.0:
            raise DomainError(f"semi-major-axis ratio must lie in (0, 1), got {self.a}")
        if not 0.0 <= self.e < 1.0:
            raise DomainError(f"eccentricity must lie in [0, 1), got {self.e}")
        if not 0.0 <= self.e_j < 1.0:
            raise DomainError(f"perturber eccentricity must lie in [0, 1), got {self.e_j}")
        g_ref = math.sqrt(self.a) * math.sqrt(1.0 - self.e * self.e)
        if abs(self.G - g_ref) > 5e-14 * max(g_ref, 1.0):
            raise DomainError(f"G={self.G} inconsistent with (a, e); expected {g_ref}")

    @classmethod
    def make(cls, a, e, e_j, theta=0.0, inc=0.0) -> "SecularParams":
        return cls(a=a, e=e, e_j=e_j, theta=theta, inc=inc,
                   G=math.sqrt(a) * math.sqrt(1.0 - e * e))


@dataclass(frozen=True)
class QuadraticForm2:
    """Symmetric 2x2 form (1/2)(A p3^2 + 2 B p3 q3 + C q3^2) with regime tags."""

    a_bar: float
    b_bar: float
    c_bar: float
    regime: Regime
    normalization: Normalization = Normalization.HALF_POINCARE

    @property
    def det(self) -> float:
        return self.a_bar * self.c_bar - self.b_bar * self.b_bar


@dataclass(frozen=True)
class StabilityVerdict:
    a_positive: bool
    c_positive: bool
    det_positive: bool
    positive_definite: bool
    det_value: float


def _s3(e_j):
    return (1.0 - e_j * e_j) ** 1.5


def _s5(e_j):
    return (1.0 - e_j * e_j) ** 2.5


def rbar_series(a, e, e_j, theta):
    """Planar secular potential truncated at third order in a.

    Returns the averaged value of -1/Delta for the coplanar
    configuration; the figure level values are the magnitude -rbar.
    """
    quad = a * a * (3.0 * e * e + 2.0) / (8.0 * _s3(e_j))
    octu = 15.0 * a**3 * e * e_j * (3.0 * e * e + 4.0) * np.cos(theta) / (64.0 * _s5(e_j))
    return -1.0 - quad + octu


def rbar_series_e_derivative(a, e, e_j, theta):
    """Analytic d rbar_series / d e at fixed (a, e_j, theta)."""
    return (-0.75 * a * a * e / _s3(e_j)
            + 15.0 * a**3 * e_j * (9.0 * e * e + 4.0) * np.cos(theta) / (64.0 * _s5(e_j)))


def rbar_quadrature(a, e, e_j, theta, grid: QuadratureGrid = QuadratureGrid(),
                    kind: KernelKind = KernelKind.EXACT, with_error=False):
    """Planar double average of -kernel, the brute-force oracle for rbar_series.

    The body's apsidal line is rotated by theta relative to the
    perturber's; both orbits are coplanar.
    """
    ct, st = math.cos(theta), math.sin(theta)
    sq = math.sqrt(1.0 - e * e)
    sj = math.sqrt(1.0 - e_j * e_j)

    def f(E, EJ):
        xp = a * (np.cos(E) - e)
        yp = a * sq * np.sin(E)
        body = InertialPosition(ct * xp - st * yp, st * xp + ct * yp, 0.0)
        planet = (np.cos(EJ) - e_j, sj * np.sin(EJ))
        return -truncated_kernel(m_terms(body, planet), kind)

    res = double_average(f, e, e_j, grid)
    return res if with_error else res.value


def equilibrium_eccentricity(a, e_j, tol=1e-13):
    """Eccentricity of the aligned equilibrium, where d rbar / d e = 0 at theta = 0.

    Bracketed Newton on the analytic derivative.  A circular perturber
    admits only e = 0; if the derivative has no sign change on
    (0, 0.99) a NoEquilibriumError is raised.
    """
    if e_j == 0.0:
        return 0.0

    def g(x):
        return float(rbar_series_e_derivative(a, x, e_j, 0.0))

    def gp(x):
        return -0.75 * a * a / _s3(e_j) + 15.0 * a**3 * e_j * 18.0 * x / (64.0 * _s5(e_j))

    lo, hi = 0.0, 0.99
    if g(hi) >= 0.0:
        raise NoEquilibriumError(
            f"d rbar/d e has no sign change on (0, 0.99) for a={a}, e_j={e_j}"
        )
    x = min(max(0.3125 * a * e_j * 4.0 / (1.0 - e_j * e_j), 1e-8), 0.98)
    for _ in range(100):
        fx = g(x)
        if fx > 0.0:
            lo = x
        else:
            hi = x
        d = gp(x)
        step = fx / d if d != 0.0 else hi - lo
        x_new = x - step
        if not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) < tol:
            return x_new
        x = x_new
    return x


def coeffs_apsidal(p: SecularParams) -> QuadraticForm2:
    """Averaged quadratic form for the aligned configuration (theta = 0).

    Abar and Cbar are the transcribed finite-inclination closed forms;
    Bbar is identically zero in this regime (verified independently by
    the oracle's harmonic extraction).
    """
    if abs(p.theta) > 1e-12:
        raise DomainError("apsidal regime requires theta = 0; use coeffs_general")
    if p.inc <= 0.0 or p.inc >= math.pi:
        raise DomainError("apsidal regime is degenerate at inc = 0; use coeffs_small_inclination")
    ci = math.cos(p.inc)
    si2 = math.sin(p.inc) ** 2
    e, a, G = p.e, p.a, p.G
    s3, s5 = _s3(p.e_j), _s5(p.e_j)
    one_m = 1.0 - ci
    quad_a = si2 * (1.0 - e * e) * a * a / (4.0 * G * one_m * s3)
    quad_c = si2 * (1.0 + 4.0 * e * e) * a * a / (4.0 * G * one_m * s3)
    octu = 15.0 * p.e_j * e * (4.0 + 3.0 * e * e) * a**3 / (16.0 * G * one_m * s5)
    return QuadraticForm2(a_bar=quad_a - octu, b_bar=0.0, c_bar=quad_c - ci * octu,
                          regime=Regime.APSIDAL)


def coeffs_small_inclination(p: SecularParams) -> QuadraticForm2:
    """Averaged quadratic form with the inclination treated as infinitesimal.

    The third-order terms carry (1 - e_j^2)^(5/2); the validation audit
    confirms this exponent against both the quadrature oracle and the
    transcribed determinant's fifth-order term.
    """
    c, s = math.cos(p.theta), math.sin(p.theta)
    e, a, G = p.e, p.a, p.G
    s3, s5 = _s3(p.e_j), _s5(p.e_j)
    e2, c2 = e * e, c * c
    a_bar = (3.0 * (1.0 + 4.0 * e2 - 5.0 * e2 * c2) * a * a / (4.0 * G * s3)
             + 15.0 * e * p.e_j * c * (70.0 * c2 * e2 - 60.0 * e2 - 10.0) * a**3 / (64.0 * G * s5))
    b_bar = (15.0 * e2 * c * s * a * a / (4.0 * G * s3)
             - 15.0 * e * s * p.e_j * (140.0 * c2 * e2 - 17.0 * e2 + 24.0) * a**3 / (128.0 * G * s5))
    c_bar = (3.0 * (1.0 - e2 + 5.0 * e2 * c2) * a * a / (4.0 * G * s3)
             - 15.0 * e * p.e_j * c * (70.0 * c2 * e2 - 27.0 * e2 + 34.0) * a**3 / (64.0 * G * s5))
    return QuadraticForm2(a_bar=a_bar, b_bar=b_bar, c_bar=c_bar,
                          regime=Regime.SMALL_INCLINATION)


def coeffs_general(p: SecularParams) -> QuadraticForm2:
    """Averaged quadratic form at general theta and finite inclination.

    At theta = 0 this reduces term by term to coeffs_apsidal.
    """
    if p.inc <= 0.0 or p.inc >= math.pi:
        raise DomainError("general regime is degenerate at inc = 0; use coeffs_small_inclination")
    c, s = math.cos(p.theta), math.sin(p.theta)
    ci = math.cos(p.inc)
    si2 = math.sin(p.inc) ** 2
    e, a, G = p.e, p.a, p.G
    s3, s5 = _s3(p.e_j), _s5(p.e_j)
    e2, c2 = e * e, c * c
    one_m = 1.0 - ci
    octu = 15.0 * p.e_j * e * (3.0 * e2 + 4.0) * a**3 / (16.0 * G * one_m * s5)
    a_bar = si2 * (1.0 + 4.0 * e2 - 5.0 * c2 * e2) * a * a / (4.0 * G * s3 * one_m) - c * octu
    b_bar = (5.0 * si2 * c * s * e2 * a * a / (4.0 * G * s3 * one_m)
             + 15.0 * s * p.e_j * e * (3.0 * e2 + 4.0) * a**3 / (32.0 * G * s5))
    c_bar = si2 * (5.0 * c2 * e2 - e2 + 1.0) * a * a / (4.0 * G * s3 * one_m) - ci * c * octu
    return QuadraticForm2(a_bar=a_bar, b_bar=b_bar, c_bar=c_bar, regime=Regime.GENERAL)


def det_small_inclination_terms(p: SecularParams):
    """The three monomial terms (orders a^4, a^5, a^6) of the transcribed
    small-inclination determinant polynomial.

    Note: the a^6 term is kept with its transcribed sign, which is the
    negative of the a^6 term of Abar Cbar - Bbar^2 formed from
    coeffs_small_inclination; the validation audit records this.
    """
    e, a, G = p.e, p.a, p.G
    c = math.cos(p.theta)
    e2, c2 = e * e, c * c
    u = 1.0 - p.e_j * p.e_j
    t4 = 9.0 * (1.0 + 3.0 * e2 - 4.0 * e2 * e2) * a**4 / (16.0 * G * G * u**3)
    t5 = (45.0 * p.e_j * (83.0 * e2 * e2 - 39.0 * e2 - 44.0) * e * c * a**5
          / (256.0 * G * G * u**4))
    t6 = (225.0 * (1431.0 * c2 * e2 * e2 + 456.0 * c2 * e2 + 289.0 * e2 * e2
                   - 1936.0 * c2 - 816.0 * e2 + 576.0) * e2 * p.e_j**2 * a**6
          / (16384.0 * G * G * u**5))
    return t4, t5, t6


def det_small_inclination(p: SecularParams) -> float:
    """Transcribed closed-form determinant for the small-inclination regime."""
    return float(sum(det_small_inclination_terms(p)))


def det_general_terms(p: SecularParams):
    """The three monomial terms (orders a^4, a^5, a^6) of the transcribed
    general-regime determinant polynomial.

    The a^4 term carries no theta dependence.  The a^6 term is kept with
    its transcribed sign (see det_small_inclination_terms).
    """
    if p.inc <= 0.0 or p.inc >= math.pi:
        raise DomainError("general regime is degenerate at inc = 0")
    e, a, G = p.e, p.a, p.G
    c, s = math.cos(p.theta), math.sin(p.theta)
    ci = math.cos(p.inc)
    si2 = math.sin(p.inc) ** 2
    e2 = e * e
    u = 1.0 - p.e_j * p.e_j
    one_m2 = (1.0 - ci) ** 2
    t4 = (1.0 + 3.0 * e2 - 4.0 * e2 * e2) * (1.0 + ci) ** 2 * a**4 / (16.0 * u**3 * G * G)
    t5 = (15.0 * si2 * c * (-4.0 * e2 - 1.0 + ci * e2 - ci) * p.e_j * (3.0 * e2 + 4.0) * e * a**5
          / (64.0 * G * G * one_m2 * u**4))
    t6 = (-225.0 * (-ci * ci * s * s + 2.0 * ci * c * c - s * s + 2.0 * ci)
          * p.e_j**2 * (3.0 * e2 + 4.0) ** 2 * e2 * a**6
          / (1024.0 * G * G * one_m2 * u**5))
    return t4, t5, t6


def det_general(p: SecularParams) -> float:
    """Transcribed closed-form determinant for the general regime."""
    return float(sum(det_general_terms(p)))


def stability_verdict(qf: QuadraticForm2) -> StabilityVerdict:
    """Sequential-principal-minor test: positive definite iff Abar > 0 and det > 0."""
    det = qf.det
    a_pos = qf.a_bar > 0.0
    det_pos = det > 0.0
    return StabilityVerdict(
        a_positive=a_pos,
        c_positive=qf.c_bar > 0.0,
        det_positive=det_pos,
        positive_definite=a_pos and det_pos,
        det_value=det,
    )
