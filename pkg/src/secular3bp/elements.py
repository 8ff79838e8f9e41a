"""Orbital-element kernels.

Kepler's equation, perifocal and inertial positions, the perturber
ephemeris, and the Delaunay / Poincare canonical variable conversions.

Units: the perturber's semi-major axis is 1, the total mass is 1 and
GM_total = 1.  The massless-body momenta use the test-particle limit,
so L = sqrt(a).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * math.pi

# Amplitudes below this (relative to L) are treated as exactly degenerate
# when converting Delaunay angles to Poincare pairs.
DEGENERACY_TOL = 1e-15


class Normalization(str, Enum):
    """Radius convention for the inclination shell (p3, q3).

    POINCARE uses the canonical radius sqrt(2 G (1 - cos i)) = sqrt(2(G - H)).
    HALF_POINCARE uses sqrt(G (1 - cos i)); it appears in some closed-form
    derivations and differs from POINCARE by sqrt(2).  Quadratic-form
    coefficients rescale by the squared ratio; definiteness is unaffected.
    """

    POINCARE = "poincare"
    HALF_POINCARE = "half-poincare"


def reduce_angle(x):
    """Reduce an angle (scalar or array) to the interval (-pi, pi]."""
    y = np.remainder(np.asarray(x, dtype=float) + math.pi, TWO_PI)
    out = np.where(y <= 0.0, y + math.pi, y - math.pi)
    # remainder maps pi -> -pi side; keep +pi representative
    out = np.where(out == -math.pi, math.pi, out)
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class OrbitalElements:
    """Osculating elements of the massless body.

    a is the semi-major-axis ratio (perturber = 1), angles are radians and
    are stored reduced to (-pi, pi].
    """

    a: float
    e: float
    i: float
    omega: float
    Omega: float
    l: float

    def __post_init__(self):
        if not self.a > 0.0:
            raise DomainError(f"semi-major axis must be positive, got {self.a}")
        if not 0.0 <= self.e < 1.0:
            raise DomainError(f"eccentricity must lie in [0, 1), got {self.e}")
        for name in ("i", "omega", "Omega", "l"):
            object.__setattr__(self, name, reduce_angle(getattr(self, name)))


@dataclass(frozen=True)
class PerturberConfig:
    """Perturber orbit: eccentricity only, a_J = 1 by convention.

    The mass ratio mu is carried for documentation; in slow time the
    averaged flow does not depend on it.
    """

    e_J: float
    mu: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.e_J < 1.0:
            raise DomainError(f"perturber eccentricity must lie in [0, 1), got {self.e_J}")


@dataclass(frozen=True)
class PerifocalPosition:
    xp: float
    yp: float


@dataclass(frozen=True)
class InertialPosition:
    x: float
    y: float
    z: float


@dataclass(frozen=True)
class DelaunayState:
    """Canonical momenta (L, G, H) and conjugate angles (l, g, h)."""

    L: float
    G: float
    H: float
    l: float
    g: float
    h: float


@dataclass(frozen=True)
class PoincareState:
    """Canonical Poincare variables regularizing the e = 0 and i = 0 charts.

    When the underlying Delaunay state is circular (L = G) or planar
    (G = H) the corresponding pair is exactly (0, 0) and the matching
    degeneracy flag is set; the lost angle is not represented by NaN.
    """

    p1: float
    q1: float
    p2: float
    q2: float
    p3: float
    q3: float
    circular_degenerate: bool = False
    planar_degenerate: bool = False


def solve_kepler(l, e):
    """Solve Kepler's equation E - e sin E = l for the eccentric anomaly.

    Newton iteration started from E0 = l + 0.85 e sign(sin l), with a
    bisection fallback for entries that have not converged after 50
    iterations.  The input mean anomaly is reduced to (-pi, pi] and the
    integer multiple of 2 pi is restored afterwards, so E is continuous
    in l.

    Parameters
    ----------
    l : float or ndarray
        Mean anomaly (rad), any real value.
    e : float
        Eccentricity in [0, 1).

    Returns
    -------
    float or ndarray
        Eccentric anomaly with E - e sin E - l smaller than 1e-13.
    """
    if not 0.0 <= e < 1.0:
        raise DomainError(f"eccentricity must lie in [0, 1), got {e}")
    scalar = np.ndim(l) == 0
    l_arr = np.asarray(l, dtype=float)
    l_red_full = np.asarray(reduce_angle(l_arr), dtype=float)
    shift = l_arr - l_red_full  # integer multiple of 2 pi, restored at the end
    l_red = np.atleast_1d(l_red_full).copy()

    E = l_red + 0.85 * e * np.sign(np.sin(l_red))
    converged = np.zeros(E.shape, dtype=bool)
    for _ in range(50):
        f = E - e * np.sin(E) - l_red
        converged = np.abs(f) < 1e-15
        if converged.all():
            break
        fp = 1.0 - e * np.cos(E)
        E = E - np.where(converged, 0.0, f / fp)

    if not converged.all():
        bad = ~converged
        lo = l_red[bad] - e - 1e-12
        hi = l_red[bad] + e + 1e-12
        target = l_red[bad]
        for _ in range(90):
            mid = 0.5 * (lo + hi)
            high_side = mid - e * np.sin(mid) - target > 0.0
            hi = np.where(high_side, mid, hi)
            lo = np.where(high_side, lo, mid)
        E[bad] = 0.5 * (lo + hi)

    out = E + np.atleast_1d(shift)
    if scalar:
        return float(out[0])
    return out.reshape(l_arr.shape)


def perifocal_position(a, e, E):
    """Position in the orbital plane: xp = a (cos E - e), yp = a sqrt(1-e^2) sin E."""
    xp = a * (np.cos(E) - e)
    yp = a * math.sqrt(1.0 - e * e) * np.sin(E)
    return PerifocalPosition(xp, yp)


def planet_position(E_J, e_J):
    """Perturber coordinates (x_J, y_J) for eccentric anomaly E_J (a_J = 1)."""
    return np.cos(E_J) - e_J, math.sqrt(1.0 - e_J * e_J) * np.sin(E_J)


def rotation_matrix(omega, Omega, inc):
    """3x2 matrix mapping perifocal (x', y') to inertial (x, y, z)."""
    co, so = math.cos(omega), math.sin(omega)
    cO, sO = math.cos(Omega), math.sin(Omega)
    ci, si = math.cos(inc), math.sin(inc)
    return np.array(
        [
            [cO * co - ci * sO * so, -cO * so - ci * sO * co],
            [sO * co + ci * cO * so, -sO * so + ci * cO * co],
            [si * so, si * co],
        ]
    )


def rotate_to_inertial(p: PerifocalPosition, omega, Omega, inc) -> InertialPosition:
    """Rotate a perifocal position into the inertial frame.

    The rotation is R_z(Omega) R_x(inc) R_z(omega) applied to (xp, yp, 0);
    it preserves the Euclidean norm.
    """
    m = rotation_matrix(omega, Omega, inc)
    return InertialPosition(
        m[0, 0] * p.xp + m[0, 1] * p.yp,
        m[1, 0] * p.xp + m[1, 1] * p.yp,
        m[2, 0] * p.xp + m[2, 1] * p.yp,
    )


def delaunay_from_elements(el: OrbitalElements) -> DelaunayState:
    """Delaunay state with the test-particle momentum L = sqrt(a)."""
    L = math.sqrt(el.a)
    G = L * math.sqrt(1.0 - el.e * el.e)
    H = G * math.cos(el.i)
    return DelaunayState(L=L, G=G, H=H, l=el.l, g=el.omega, h=el.Omega)


def elements_from_delaunay(d: DelaunayState) -> OrbitalElements:
    if d.L <= 0.0 or d.G <= 0.0:
        raise DomainError("momenta must satisfy L > 0 and G > 0 (e -> 1 rejected)")
    if d.G > d.L * (1.0 + 1e-12) or abs(d.H) > d.G * (1.0 + 1e-12):
        raise DomainError("momenta must satisfy L >= G >= |H|")
    ratio = min(d.G / d.L, 1.0)
    e = math.sqrt(max(0.0, 1.0 - ratio * ratio))
    inc = math.acos(max(-1.0, min(1.0, d.H / d.G)))
    return OrbitalElements(a=d.L * d.L, e=e, i=inc, omega=d.g, Omega=d.h, l=d.l)


def poincare_from_delaunay(d: DelaunayState) -> PoincareState:
    """Poincare variables; exactly (0, 0) pairs flag the degenerate charts."""
    circ = d.L - d.G <= DEGENERACY_TOL * d.L
    plan = d.G - d.H <= DEGENERACY_TOL * d.G
    gh = d.g + d.h
    if circ:
        p2 = q2 = 0.0
    else:
        r2 = math.sqrt(2.0 * (d.L - d.G))
        p2, q2 = r2 * math.cos(gh), -r2 * math.sin(gh)
    if plan:
        p3 = q3 = 0.0
    else:
        r3 = math.sqrt(2.0 * (d.G - d.H))
        p3, q3 = r3 * math.cos(d.h), -r3 * math.sin(d.h)
    return PoincareState(
        p1=d.L,
        q1=reduce_angle(d.l + gh),
        p2=p2,
        q2=q2,
        p3=p3,
        q3=q3,
        circular_degenerate=bool(circ),
        planar_degenerate=bool(plan),
    )


def delaunay_from_poincare(p: PoincareState) -> DelaunayState:
    """Invert the Poincare map; degenerate angles are returned as 0."""
    L = p.p1
    G = L - 0.5 * (p.p2 * p.p2 + p.q2 * p.q2)
    H = G - 0.5 * (p.p3 * p.p3 + p.q3 * p.q3)
    if p.planar_degenerate or (p.p3 == 0.0 and p.q3 == 0.0):
        h = 0.0
    else:
        h = math.atan2(-p.q3, p.p3)
    if p.circular_degenerate or (p.p2 == 0.0 and p.q2 == 0.0):
        gh = 0.0
    else:
        gh = math.atan2(-p.q2, p.p2)
    return DelaunayState(L=L, G=G, H=H, l=reduce_angle(p.q1 - gh), g=reduce_angle(gh - h), h=h)


def shell_p3q3(inc, Omega, G, normalization=Normalization.POINCARE):
    """Point on the inclination shell at node angle Omega.

    The shell of inclination inc at fixed G is the circle
    p3^2 + q3^2 = kappa G (1 - cos inc) with kappa = 2 for POINCARE
    and kappa = 1 for HALF_POINCARE; (p3, q3) = r (cos Omega, -sin Omega).
    """
    if inc <= 0.0 or inc >= math.pi:
        raise DomainError(f"shell inclination must lie in (0, pi), got {inc}")
    kappa = 2.0 if Normalization(normalization) is Normalization.POINCARE else 1.0
    r = math.sqrt(kappa * G * (1.0 - math.cos(inc)))
    return r * math.cos(Omega), -r * math.sin(Omega)
