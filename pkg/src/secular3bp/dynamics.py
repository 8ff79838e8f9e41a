"""Planar averaged flow and linearized out-of-plane flow.

The planar flow uses the canonical pair (p2, q2) with the secular
Hamiltonian H = -rbar_series, so the conserved level along a trajectory
equals the figure level value (about +1.0028 for the reference
parameters).  H is analytic in (p2, q2) everywhere including the
origin; only the derived (theta, e) chart degenerates at e = 0.

Level curves are classified as equilibrium, librating, separatrix or
circulating from the accumulated winding of theta = omega + Omega and
the level's distance to the critical (through-origin) level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .elements import Normalization
from .errors import DomainError, LevelNotAttainedError
from .secular import (
    QuadraticForm2,
    SecularParams,
    coeffs_general,
    equilibrium_eccentricity,
    rbar_series,
)


class Classification(str, Enum):
    EQUILIBRIUM = "equilibrium"
    LIBRATING = "librating"
    SEPARATRIX = "separatrix"
    CIRCULATING = "circulating"
    UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class PlanarState:
    p2: float
    q2: float


@dataclass(frozen=True)
class Trajectory:
    """Sampled planar trajectory: rows of samples are (tau, p2, q2)."""

    samples: np.ndarray
    level: float
    classification: Classification = Classification.UNCLASSIFIED
    period: float | None = None
    winding: float = 0.0
    max_abs_theta: float = 0.0
    complete: bool = True
    level_drift: float = 0.0


@dataclass(frozen=True)
class EllipseCurve:
    """Sampled (p3, q3) curve of constant quadratic-form value w_level."""

    samples: np.ndarray
    w_level: float
    params: SecularParams | None = None
    period: float | None = None
    w_drift: float = 0.0


@dataclass(frozen=True)
class WPortrait:
    """Family of level ellipses along a planar level set, with their spread.

    spread is the largest relative deviation of any family member's
    boundary radius from the reference (first-sample) ellipse, measured
    at a common set of polar angles and normalized by the shell radius.
    """

    curves: list[EllipseCurve] = field(default_factory=list)
    spread: float = 0.0
    shell_radius: float = 0.0


# ---------------------------------------------------------------------------
# planar model


def _model(a, e_j):
    L = math.sqrt(a)
    s3 = (1.0 - e_j * e_j) ** 1.5
    s5 = (1.0 - e_j * e_j) ** 2.5
    kq = 3.0 * a * a / (8.0 * s3)
    ko = 15.0 * a**3 * e_j / (64.0 * s5)
    base = 1.0 + a * a / (4.0 * s3)
    return L, kq, ko, base


def planar_state_from_theta_e(theta, e, a) -> PlanarState:
    """State on the (theta, e) chart; e = 0 maps to the origin."""
    L = math.sqrt(a)
    r = math.sqrt(2.0 * L * (1.0 - math.sqrt(1.0 - e * e)))
    return PlanarState(r * math.cos(theta), -r * math.sin(theta))


def theta_e_of_state(s: PlanarState, a):
    """Derived (theta, e) view; theta is undefined (returned 0) at the origin."""
    L = math.sqrt(a)
    P = s.p2 * s.p2 + s.q2 * s.q2
    if P >= 2.0 * L:
        raise DomainError("state outside the bound chart (e >= 1)")
    e2 = P / L - P * P / (4.0 * L * L)
    theta = math.atan2(-s.q2, s.p2) if P > 0.0 else 0.0
    return theta, math.sqrt(max(0.0, e2))


def planar_hamiltonian(s: PlanarState, a, e_j) -> float:
    """Level value -rbar at the state (analytic in (p2, q2), origin included)."""
    L, kq, ko, base = _model(a, e_j)
    P = s.p2 * s.p2 + s.q2 * s.q2
    if P >= 2.0 * L:
        raise DomainError("state outside the bound chart (e >= 1)")
    e2 = P / L - P * P / (4.0 * L * L)
    w = math.sqrt(1.0 / L - P / (4.0 * L * L))
    return base + kq * e2 - ko * (3.0 * e2 + 4.0) * s.p2 * w


def _field(p2, q2, L, kq, ko):
    P = p2 * p2 + q2 * q2
    de2 = 1.0 / L - P / (2.0 * L * L)
    w = math.sqrt(1.0 / L - P / (4.0 * L * L))
    wp = -1.0 / (8.0 * L * L * w)
    e2 = P / L - P * P / (4.0 * L * L)
    hp = kq * de2 * 2.0 * p2 - ko * (6.0 * de2 * p2 * p2 * w + (3.0 * e2 + 4.0) * (w + 2.0 * p2 * p2 * wp))
    hq = kq * de2 * 2.0 * q2 - ko * (6.0 * de2 * q2 * p2 * w + (3.0 * e2 + 4.0) * 2.0 * p2 * q2 * wp)
    return -hq, hp


def planar_vector_field(s: PlanarState, a, e_j):
    """Canonical vector field (dp2/dtau, dq2/dtau) of the planar Hamiltonian.

    Analytic partial derivatives via the chain rule; the field is smooth
    at the origin even though the (theta, e) chart is not.
    """
    L, kq, ko, _ = _model(a, e_j)
    P = s.p2 * s.p2 + s.q2 * s.q2
    if P >= 2.0 * L * (1.0 - 1e-12):
        raise DomainError("state at the e -> 1 boundary of the chart")
    return _field(s.p2, s.q2, L, kq, ko)


def equilibrium_state(a, e_j):
    """Aligned equilibrium (p2*, 0) and its level value."""
    e_star = equilibrium_eccentricity(a, e_j)
    s = planar_state_from_theta_e(0.0, e_star, a)
    return s, planar_hamiltonian(s, a, e_j)


def separatrix_level(a, e_j) -> float:
    """Level of the critical curve through the origin (e = 0)."""
    return -float(rbar_series(a, 0.0, e_j, 0.0))


# ---------------------------------------------------------------------------
# integration


def _integrate_core(p2, q2, a, e_j, dt, max_steps, stop_on_period):
    """Fixed-step RK4.  Returns samples, winding, max|theta|, period, complete.

    When stop_on_period is set the start point must lie on the q2 = 0
    section; the run stops at the second section crossing, whose
    interpolated time is one full period for both librating and
    circulating topologies.
    """
    L, kq, ko, _ = _model(a, e_j)
    bound = 2.0 * L * (1.0 - 1e-12)
    samples = [(0.0, p2, q2)]
    theta = math.atan2(-q2, p2) if (p2, q2) != (0.0, 0.0) else 0.0
    winding = 0.0
    max_theta = abs(theta)
    crossings = 0
    period = None
    complete = True
    t = 0.0
    for _ in range(max_steps):
        k1 = _field(p2, q2, L, kq, ko)
        k2 = _field(p2 + 0.5 * dt * k1[0], q2 + 0.5 * dt * k1[1], L, kq, ko)
        k3 = _field(p2 + 0.5 * dt * k2[0], q2 + 0.5 * dt * k2[1], L, kq, ko)
        k4 = _field(p2 + dt * k3[0], q2 + dt * k3[1], L, kq, ko)
        q2_prev = q2
        p2 += dt * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) / 6.0
        q2 += dt * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) / 6.0
        t += dt
        samples.append((t, p2, q2))
        if p2 * p2 + q2 * q2 >= bound:
            complete = False
            break
        th = math.atan2(-q2, p2)
        d = th - theta
        while d > math.pi:
            d -= 2.0 * math.pi
        while d < -math.pi:
            d += 2.0 * math.pi
        winding += d
        theta = th
        max_theta = max(max_theta, abs(th))
        if stop_on_period and t > 2.0 * dt and q2_prev * q2 <= 0.0 and q2 != q2_prev:
            crossings += 1
            if crossings == 2:
                period = t - dt + dt * q2_prev / (q2_prev - q2)
                break
    else:
        complete = complete and not stop_on_period
    if stop_on_period and period is None:
        complete = False
    return np.array(samples), winding, max_theta, period, complete


def integrate_trajectory(s0: PlanarState, a, e_j, dt, steps, drift_tol=1e-9,
                         max_halvings=4) -> Trajectory:
    """Integrate the planar flow for a fixed number of RK4 steps.

    The conserved level is monitored; if the relative drift between the
    endpoints exceeds drift_tol the step is halved (and the count
    doubled) up to max_halvings times.  Leaving the bound chart
    truncates the trajectory and clears the complete flag.
    """
    if dt <= 0.0:
        raise DomainError("dt must be positive")
    level = planar_hamiltonian(s0, a, e_j)
    for _ in range(max_halvings + 1):
        samples, winding, max_theta, _, complete = _integrate_core(
            s0.p2, s0.q2, a, e_j, dt, steps, stop_on_period=False
        )
        end = PlanarState(samples[-1, 1], samples[-1, 2])
        drift = abs(planar_hamiltonian(end, a, e_j) - level) if complete else math.inf
        if not complete or drift <= drift_tol * abs(level):
            break
        dt *= 0.5
        steps *= 2
    return Trajectory(samples=samples, level=level, winding=winding,
                      max_abs_theta=max_theta, complete=complete,
                      level_drift=0.0 if not complete else drift)


def _bisect(f, lo, hi, iters=200):
    flo = f(lo)
    if flo == 0.0:
        return lo
    if flo * f(hi) > 0.0:
        raise LevelNotAttainedError("level not bracketed on the seed axis")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) * flo > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16:
            break
    return 0.5 * (lo + hi)


def level_curve(level, a, e_j, dt=None, max_steps=400_000, equilibrium_band=1e-8,
                separatrix_band=1e-8, drift_tol=1e-9) -> Trajectory:
    """Trajectory of one planar level, seeded by a 1-D root solve in e.

    Librating levels are seeded on the theta = 0 axis above the
    equilibrium eccentricity, circulating levels on theta = pi.  Levels
    within equilibrium_band of the minimum return a single-point
    trajectory; levels within separatrix_band of the through-origin
    level integrate the critical curve and are tagged SEPARATRIX.
    """
    eq, h_star = equilibrium_state(a, e_j)
    h_sep = separatrix_level(a, e_j)
    L, kq, _, _ = _model(a, e_j)
    if level < h_star - equilibrium_band:
        raise LevelNotAttainedError(
            f"level {level} below the planar minimum {h_star}"
        )
    if abs(level - h_star) <= equilibrium_band:
        return Trajectory(samples=np.array([(0.0, eq.p2, eq.q2)]), level=h_star,
                          classification=Classification.EQUILIBRIUM, period=None)

    e_star = equilibrium_eccentricity(a, e_j)

    def h_axis(e, th):
        return planar_hamiltonian(planar_state_from_theta_e(th, e, a), a, e_j)

    if abs(level - h_sep) <= separatrix_band:
        target, theta0 = h_sep, 0.0
        e_seed = _bisect(lambda x: h_axis(x, 0.0) - h_sep, e_star, 0.99)
    elif level < h_sep:
        target, theta0 = level, 0.0
        e_seed = _bisect(lambda x: h_axis(x, 0.0) - level, e_star, 0.99)
    else:
        target, theta0 = level, math.pi
        e_seed = _bisect(lambda x: h_axis(x, math.pi) - level, 1e-14, 0.99)

    s0 = planar_state_from_theta_e(theta0, e_seed, a)
    if dt is None:
        dt = math.pi * L / kq / 1024.0  # about 1/1024 of the libration period
    for _ in range(4):
        samples, winding, max_theta, period, complete = _integrate_core(
            s0.p2, s0.q2, a, e_j, dt, max_steps, stop_on_period=True
        )
        end = PlanarState(samples[-1, 1], samples[-1, 2])
        drift = abs(planar_hamiltonian(end, a, e_j) - target)
        if drift <= drift_tol * abs(target):
            break
        dt *= 0.5
        max_steps *= 2
    traj = Trajectory(samples=samples, level=target, winding=winding,
                      max_abs_theta=max_theta, period=period, complete=complete,
                      level_drift=drift)
    cls = classify_level(traj, a, e_j, equilibrium_band=equilibrium_band,
                         separatrix_band=separatrix_band)
    return Trajectory(samples=samples, level=target, classification=cls,
                      period=period, winding=winding, max_abs_theta=max_theta,
                      complete=complete, level_drift=drift)


def classify_level(t: Trajectory, a, e_j, equilibrium_band=1e-8,
                   separatrix_band=1e-8) -> Classification:
    """Classify a sampled trajectory from its diameter, level and winding."""
    diam = max(np.ptp(t.samples[:, 1]), np.ptp(t.samples[:, 2]))
    if diam < equilibrium_band:
        return Classification.EQUILIBRIUM
    if abs(t.level - separatrix_level(a, e_j)) <= separatrix_band:
        return Classification.SEPARATRIX
    if not t.complete:
        return Classification.UNCLASSIFIED
    if abs(t.winding) > math.pi:
        return Classification.CIRCULATING
    if abs(t.winding) <= 0.1 and t.max_abs_theta < math.pi / 2.0:
        return Classification.LIBRATING
    return Classification.UNCLASSIFIED


# ---------------------------------------------------------------------------
# linearized out-of-plane flow


def linearized_normal_flow(qf: QuadraticForm2, s0, dt, steps) -> EllipseCurve:
    """Integrate the linear flow of the quadratic form with fixed-step RK4.

    dp3/dtau = -(B p3 + C q3), dq3/dtau = A p3 + B q3.  The form value
    W is conserved; when the form is positive definite the orbit is an
    ellipse closing with period 2 pi / sqrt(det).  The period is
    measured from the second q3 = 0 section crossing when the start
    point lies on that section.
    """
    A, B, C = qf.a_bar, qf.b_bar, qf.c_bar

    def w(p3, q3):
        return 0.5 * (A * p3 * p3 + 2.0 * B * p3 * q3 + C * q3 * q3)

    def f(p3, q3):
        return -(B * p3 + C * q3), A * p3 + B * q3

    p3, q3 = float(s0[0]), float(s0[1])
    w0 = w(p3, q3)
    on_section = q3 == 0.0
    samples = [(p3, q3)]
    w_drift = 0.0
    crossings = 0
    period = None
    t = 0.0
    for _ in range(steps):
        k1 = f(p3, q3)
        k2 = f(p3 + 0.5 * dt * k1[0], q3 + 0.5 * dt * k1[1])
        k3 = f(p3 + 0.5 * dt * k2[0], q3 + 0.5 * dt * k2[1])
        k4 = f(p3 + dt * k3[0], q3 + dt * k3[1])
        q3_prev = q3
        p3 += dt * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) / 6.0
        q3 += dt * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) / 6.0
        t += dt
        samples.append((p3, q3))
        w_drift = max(w_drift, abs(w(p3, q3) - w0))
        if on_section and period is None and t > 2.0 * dt and q3_prev * q3 <= 0.0 and q3 != q3_prev:
            crossings += 1
            if crossings == 2:
                period = t - dt + dt * q3_prev / (q3_prev - q3)
    return EllipseCurve(samples=np.array(samples), w_level=w0, period=period,
                        w_drift=w_drift)


def w_portrait(levelset: Trajectory, inc, n_samples, a, e_j,
               normalization=Normalization.POINCARE, n_angles=256) -> WPortrait:
    """Level ellipses of the general-regime form along a planar level set.

    The level set is sampled at n_samples points; at each (theta, e) the
    general-regime form is built and its level curve through the common
    shell point (r0, 0) is emitted, where r0 is the shell radius of the
    given inclination at the reference (first-sample) G.  The spread
    field measures how much the family members deviate from the first
    ellipse, quantifying the influence of the e and theta variation
    along the orbit.
    """
    L = math.sqrt(a)
    idx = np.unique(np.linspace(0, len(levelset.samples) - 1, n_samples).astype(int))
    kappa = 2.0 if Normalization(normalization) is Normalization.POINCARE else 1.0
    phi = 2.0 * np.pi * np.arange(n_angles) / n_angles
    cphi, sphi = np.cos(phi), np.sin(phi)

    curves = []
    radii = []
    r0 = None
    for k in idx:
        s = PlanarState(levelset.samples[k, 1], levelset.samples[k, 2])
        theta, e = theta_e_of_state(s, a)
        params = SecularParams.make(a, e, e_j, theta=theta, inc=inc)
        qf = coeffs_general(params)
        if r0 is None:
            r0 = math.sqrt(kappa * params.G * (1.0 - math.cos(inc)))
        w_level = 0.5 * qf.a_bar * r0 * r0
        denom = qf.a_bar * cphi**2 - 2.0 * qf.b_bar * cphi * sphi + qf.c_bar * sphi**2
        if np.any(denom <= 0.0):
            raise DomainError("form is not positive definite along the level set")
        r = np.sqrt(2.0 * w_level / denom)
        radii.append(r)
        curves.append(EllipseCurve(samples=np.column_stack((r * cphi, -r * sphi)),
                                   w_level=w_level, params=params))
    spread = 0.0
    for r in radii[1:]:
        spread = max(spread, float(np.max(np.abs(r - radii[0]))) / r0)
    return WPortrait(curves=curves, spread=spread, shell_radius=r0)
