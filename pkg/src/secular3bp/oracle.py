"""Brute-force validation of the closed-form secular algebra.

The oracle evaluates the double-averaged interaction kernel on
inclination shells: the body's node angle Omega sweeps the shell while
theta = omega + Omega is held fixed, and the Fourier content of the
shell average in 2 Omega recovers the averaged quadratic form of the
out-of-plane pair without ever touching the coordinate singularity at
zero inclination.

Comparisons with the transcribed closed forms are reported at the
harmonic level (coefficient mismatch scaled by the squared shell
radius, i.e. in units of the shell-averaged potential), where agreement
improves as (1 - cos i)^2 when the closed form is consistent.
Mismatches are classified as findings rather than failures, except for
the qualitative claims (vanishing cross coefficient in the aligned
case, vanishing indirect term, aligned reduction identity, recovery
convergence and definiteness agreement), which are hard checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .averaging import QuadratureGrid
from .elements import InertialPosition, Normalization, rotation_matrix
from .errors import DomainError, QuadratureError
from .parallel import indexed_map
from .potential import KernelKind, indirect_term, m_terms, truncated_kernel
from .secular import (
    QuadraticForm2,
    Regime,
    SecularParams,
    coeffs_apsidal,
    coeffs_general,
    coeffs_small_inclination,
    det_general,
    det_general_terms,
    det_small_inclination,
    det_small_inclination_terms,
    equilibrium_eccentricity,
    stability_verdict,
)

_CLOSED_FORMS = {
    Regime.APSIDAL: coeffs_apsidal,
    Regime.SMALL_INCLINATION: coeffs_small_inclination,
    Regime.GENERAL: coeffs_general,
}


@dataclass(frozen=True)
class OracleReport:
    """Outcome of one recovery-vs-closed-form comparison ladder."""

    params: SecularParams
    recovered: QuadraticForm2
    closed_form: QuadraticForm2
    residuals: dict
    convergence_order: float
    kernel: KernelKind
    verdict: str  # "match" or "mismatch-logged"

    def to_dict(self):
        return {
            "params": vars(self.params).copy(),
            "recovered": _qf_dict(self.recovered),
            "closed_form": _qf_dict(self.closed_form),
            "residuals": dict(self.residuals),
            "convergence_order": self.convergence_order,
            "kernel": self.kernel.value,
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class TruncationFinding:
    kind: KernelKind
    a_values: tuple
    errors: tuple
    order: float


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""


@dataclass
class ValidationReport:
    hard_checks: list = field(default_factory=list)
    findings: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.hard_checks)

    def to_dict(self):
        return {
            "passed": self.passed,
            "hard_checks": [vars(c).copy() for c in self.hard_checks],
            "findings": self.findings,
            "warnings": self.warnings,
        }


def _qf_dict(qf: QuadraticForm2):
    return {
        "a_bar": qf.a_bar,
        "b_bar": qf.b_bar,
        "c_bar": qf.c_bar,
        "det": qf.det,
        "regime": qf.regime.value,
        "normalization": qf.normalization.value,
    }


def _anomaly_nodes(e, n):
    E = 2.0 * np.pi * np.arange(n) / n
    return E, (1.0 - e * np.cos(E)) / n


def ubar_on_shell(a, e, e_j, theta, inc, Omega, grid: QuadratureGrid = QuadratureGrid(),
                  kind: KernelKind = KernelKind.EXACT) -> float:
    """Double average of the kernel with the body's frame set by (theta, inc, Omega).

    The argument of pericenter is theta - Omega, so theta is held fixed
    while Omega parameterizes the shell.  inc = 0 gives the planar
    reference value, which is independent of Omega.
    """
    E, w_e = _anomaly_nodes(e, grid.n_e)
    EJ, w_j = _anomaly_nodes(e_j, grid.n_ej)
    xp = a * (np.cos(E) - e)
    yp = a * math.sqrt(1.0 - e * e) * np.sin(E)
    m = rotation_matrix(theta - Omega, Omega, inc)
    body = InertialPosition(
        (m[0, 0] * xp + m[0, 1] * yp)[:, None],
        (m[1, 0] * xp + m[1, 1] * yp)[:, None],
        (m[2, 0] * xp + m[2, 1] * yp)[:, None],
    )
    planet = ((np.cos(EJ) - e_j)[None, :], (math.sqrt(1.0 - e_j * e_j) * np.sin(EJ))[None, :])
    vals = truncated_kernel(m_terms(body, planet), kind)
    if not np.all(np.isfinite(vals)):
        raise QuadratureError("non-finite kernel sample on the shell")
    return float(w_e @ (vals @ w_j))


def omega_profile(a, e, e_j, theta, inc, grid: QuadratureGrid = QuadratureGrid(),
                  n_omega=16, kind: KernelKind = KernelKind.EXACT):
    """Shell averages at n_omega equally spaced node angles."""
    if n_omega < 8:
        raise DomainError("need at least 8 node angles for the harmonic extraction")
    Om = 2.0 * np.pi * np.arange(n_omega) / n_omega
    vals = np.array(indexed_map(
        lambda o: ubar_on_shell(a, e, e_j, theta, inc, o, grid, kind), Om))
    return Om, vals


def harmonics_in_Omega(a, e, e_j, theta, inc, grid: QuadratureGrid = QuadratureGrid(),
                       n_omega=16, kind: KernelKind = KernelKind.EXACT):
    """Mean and 2-Omega Fourier coefficients (c0, c2, s2) of the shell average."""
    Om, vals = omega_profile(a, e, e_j, theta, inc, grid, n_omega, kind)
    c0 = float(vals.mean())
    c2 = float(2.0 * np.mean(vals * np.cos(2.0 * Om)))
    s2 = float(2.0 * np.mean(vals * np.sin(2.0 * Om)))
    return c0, c2, s2


def _shell_radius_sq(G, inc, normalization):
    kappa = 2.0 if Normalization(normalization) is Normalization.POINCARE else 1.0
    return kappa * G * (1.0 - math.cos(inc))


def recover_quadratic_form(a, e, e_j, theta, inc, grid: QuadratureGrid = QuadratureGrid(),
                           normalization=Normalization.POINCARE,
                           kind: KernelKind = KernelKind.EXACT,
                           n_omega=16) -> QuadraticForm2:
    """Recover (Abar, Bbar, Cbar) from shell harmonics of the averaged kernel.

    With rho^2 the squared shell radius of the chosen normalization and
    the quadratic form taken of the secular Hamiltonian (minus the
    kernel average), the harmonics give Abar - Cbar = -4 c2 / rho^2,
    Bbar = 2 s2 / rho^2 and Abar + Cbar = -4 (c0 - planar) / rho^2; the
    overall sign is fixed so the aligned-case leading coefficient is
    positive.
    """
    if inc <= 0.0:
        raise DomainError("shell recovery needs a positive inclination")
    G = math.sqrt(a) * math.sqrt(1.0 - e * e)
    rho2 = _shell_radius_sq(G, inc, normalization)
    c0, c2, s2 = harmonics_in_Omega(a, e, e_j, theta, inc, grid, n_omega, kind)
    planar = ubar_on_shell(a, e, e_j, theta, 0.0, 0.0, grid, kind)
    if max(abs(c2), abs(s2), abs(c0 - planar)) < 1e-13:
        raise QuadratureError("shell signal below the quadrature noise floor")
    a_m_c = -4.0 * c2 / rho2
    b_bar = 2.0 * s2 / rho2
    a_p_c = -4.0 * (c0 - planar) / rho2
    return QuadraticForm2(
        a_bar=0.5 * (a_p_c + a_m_c),
        b_bar=b_bar,
        c_bar=0.5 * (a_p_c - a_m_c),
        regime=Regime.GENERAL,
        normalization=Normalization(normalization),
    )


def indirect_average(a, e, e_j, theta, inc, Omega,
                     grid: QuadratureGrid = QuadratureGrid()) -> float:
    """Double average of the indirect term; vanishes analytically."""
    E, w_e = _anomaly_nodes(e, grid.n_e)
    EJ, w_j = _anomaly_nodes(e_j, grid.n_ej)
    xp = a * (np.cos(E) - e)
    yp = a * math.sqrt(1.0 - e * e) * np.sin(E)
    m = rotation_matrix(theta - Omega, Omega, inc)
    body = InertialPosition(
        (m[0, 0] * xp + m[0, 1] * yp)[:, None],
        (m[1, 0] * xp + m[1, 1] * yp)[:, None],
        (m[2, 0] * xp + m[2, 1] * yp)[:, None],
    )
    vals = indirect_term(body, EJ[None, :], e_j)
    return float(w_e @ (vals @ w_j))


def truncation_audit(a_list, e, e_j, theta, inc,
                     grid: QuadratureGrid = QuadratureGrid(), Omega=0.7):
    """Convergence order of each truncated kernel against the exact one.

    Returns one TruncationFinding per kernel kind; the consistent
    variant is the one whose fitted order reaches 4.
    """
    out = []
    exact = [ubar_on_shell(av, e, e_j, theta, inc, Omega, grid, KernelKind.EXACT)
             for av in a_list]
    for kind in (KernelKind.EXACT, KernelKind.LEGENDRE, KernelKind.CROSS_HALVED):
        errs = []
        for av, ex in zip(a_list, exact):
            errs.append(abs(ubar_on_shell(av, e, e_j, theta, inc, Omega, grid, kind) - ex))
        if kind is KernelKind.EXACT:
            order = math.nan
        else:
            order = float(np.polyfit(np.log(a_list), np.log(errs), 1)[0])
        out.append(TruncationFinding(kind=kind, a_values=tuple(a_list),
                                     errors=tuple(errs), order=order))
    return out


def harmonic_residuals(a, e, e_j, theta, inc, qf: QuadraticForm2,
                       grid: QuadratureGrid = QuadratureGrid(),
                       kind: KernelKind = KernelKind.LEGENDRE, n_omega=16):
    """Shell-harmonic mismatch between measurement and a closed form.

    The closed form predicts c0 = planar - rho^2 (A + C) / 4,
    c2 = -rho^2 (A - C) / 4 and s2 = rho^2 B / 2 on the shell; the
    residuals are the absolute differences, in potential units.
    """
    G = math.sqrt(a) * math.sqrt(1.0 - e * e)
    rho2 = _shell_radius_sq(G, inc, qf.normalization)
    c0, c2, s2 = harmonics_in_Omega(a, e, e_j, theta, inc, grid, n_omega, kind)
    planar = ubar_on_shell(a, e, e_j, theta, 0.0, 0.0, grid, kind)
    return {
        "c0": abs(c0 - (planar - rho2 * (qf.a_bar + qf.c_bar) / 4.0)),
        "c2": abs(c2 + rho2 * (qf.a_bar - qf.c_bar) / 4.0),
        "s2": abs(s2 - rho2 * qf.b_bar / 2.0),
    }


def recovery_report(a, e, e_j, theta, i_list=(0.4, 0.2, 0.1, 0.05),
                    grid: QuadratureGrid = QuadratureGrid(),
                    kind: KernelKind = KernelKind.LEGENDRE,
                    normalization=Normalization.POINCARE,
                    closed: Regime = Regime.SMALL_INCLINATION) -> OracleReport:
    """Recovery ladder over shrinking inclinations against one closed form.

    convergence_order is the fitted slope of the total harmonic residual
    against (1 - cos i); a consistent closed form gives 2.  The verdict
    is "match" when the slope lies within 15 percent of 2, otherwise
    "mismatch-logged".
    """
    i_list = sorted(i_list, reverse=True)
    totals = []
    for inc in i_list:
        params = SecularParams.make(a, e, e_j, theta=theta, inc=inc)
        qf = _closed_for(closed, params, normalization)
        res = harmonic_residuals(a, e, e_j, theta, inc, qf, grid, kind)
        totals.append(res["c0"] + res["c2"] + res["s2"])
    x = np.log([1.0 - math.cos(i) for i in i_list])
    order = float(np.polyfit(x, np.log(totals), 1)[0])
    inc_min = i_list[-1]
    params = SecularParams.make(a, e, e_j, theta=theta, inc=inc_min)
    closed_qf = _closed_for(closed, params, normalization)
    recovered = recover_quadratic_form(a, e, e_j, theta, inc_min, grid,
                                       normalization, kind)
    residuals = harmonic_residuals(a, e, e_j, theta, inc_min, closed_qf, grid, kind)
    verdict = "match" if abs(order - 2.0) <= 0.3 else "mismatch-logged"
    return OracleReport(params=params, recovered=recovered, closed_form=closed_qf,
                        residuals=residuals, convergence_order=order, kernel=kind,
                        verdict=verdict)


def _closed_for(regime: Regime, params: SecularParams, normalization) -> QuadraticForm2:
    qf = _CLOSED_FORMS[Regime(regime)](params)
    return QuadraticForm2(a_bar=qf.a_bar, b_bar=qf.b_bar, c_bar=qf.c_bar,
                          regime=qf.regime, normalization=Normalization(normalization))


# ---------------------------------------------------------------------------
# validation suite


def pd_violations(regime: Regime, n_points, rng, a_max=0.1, e_max=0.9, e_j_max=0.6,
                  i_range=(0.0, math.pi / 2.0), theta_random=True):
    """Count positive-definiteness violations of a closed form on a random box."""
    fn = _CLOSED_FORMS[Regime(regime)]
    bad = 0
    first = None
    for _ in range(n_points):
        a = rng.uniform(0.0, a_max)
        if a <= 1e-6:
            a = 1e-6
        e = rng.uniform(1e-9, e_max)
        e_j = rng.uniform(0.0, e_j_max)
        theta = rng.uniform(0.0, 2.0 * math.pi) if theta_random else 0.0
        inc = rng.uniform(max(i_range[0], 1e-9), i_range[1])
        p = SecularParams.make(a, e, e_j, theta=theta, inc=inc)
        v = stability_verdict(fn(p))
        if not v.positive_definite:
            bad += 1
            if first is None:
                first = {"a": a, "e": e, "e_j": e_j, "theta": theta, "inc": inc,
                         "a_bar": fn(p).a_bar, "det": fn(p).det}
    return bad, first


def run_validation(a=0.1, e_j=0.3, grid: QuadratureGrid = QuadratureGrid(),
                   inclinations=(0.1, 0.3, 0.6, 1.0, 1.4), seed=12345,
                   n_indirect=50, corrupt_closed_form=False) -> ValidationReport:
    """Full oracle suite: hard checks plus logged findings.

    Hard checks cover the qualitative claims; quantitative disagreements
    between the transcribed closed forms and the quadrature are recorded
    in the findings section.  corrupt_closed_form is a negative-control
    hook that corrupts the aligned closed form before the reduction
    identity check.
    """
    rep = ValidationReport()
    rng = np.random.default_rng(seed)
    if grid.n_e < 64 or grid.n_ej < 64:
        rep.warnings.append(
            f"coarse grid {grid.n_e}x{grid.n_ej}: quadrature estimates may be loose"
        )

    # 1. cross coefficient vanishes in the aligned configuration
    e_star = equilibrium_eccentricity(a, e_j)
    worst_s2 = 0.0
    for inc in inclinations:
        _, _, s2 = harmonics_in_Omega(a, e_star, e_j, 0.0, inc, grid)
        worst_s2 = max(worst_s2, abs(s2))
    rep.hard_checks.append(CheckResult(
        name="aligned_cross_harmonic_zero", passed=worst_s2 < 1e-10,
        value=worst_s2, threshold=1e-10,
        detail=f"max |s2| at theta=0 over inclinations {tuple(inclinations)}"))

    # 2. indirect term averages to zero
    worst_ind = 0.0
    for _ in range(n_indirect):
        worst_ind = max(worst_ind, abs(indirect_average(
            rng.uniform(0.02, 0.3), rng.uniform(0.0, 0.9), rng.uniform(0.0, 0.8),
            rng.uniform(0.0, 2.0 * math.pi), rng.uniform(0.0, 1.5),
            rng.uniform(0.0, 2.0 * math.pi), grid)))
    rep.hard_checks.append(CheckResult(
        name="indirect_average_vanishes", passed=worst_ind < 1e-12,
        value=worst_ind, threshold=1e-12,
        detail=f"max |double average| over {n_indirect} random configurations"))

    # 3. aligned reduction identity
    worst_red = 0.0
    for _ in range(1000):
        p = SecularParams.make(rng.uniform(0.01, 0.3), rng.uniform(1e-6, 0.9),
                               rng.uniform(0.0, 0.8), theta=0.0,
                               inc=rng.uniform(0.05, 1.5))
        qa = coeffs_apsidal(p)
        qg = coeffs_general(p)
        if corrupt_closed_form:
            qa = QuadraticForm2(a_bar=-qa.a_bar, b_bar=qa.b_bar, c_bar=qa.c_bar,
                                regime=qa.regime, normalization=qa.normalization)
        scale = max(abs(qa.a_bar), abs(qa.c_bar), 1e-300)
        worst_red = max(worst_red,
                        abs(qg.a_bar - qa.a_bar) / scale,
                        abs(qg.b_bar - qa.b_bar) / scale,
                        abs(qg.c_bar - qa.c_bar) / scale)
    rep.hard_checks.append(CheckResult(
        name="aligned_reduction_identity", passed=worst_red < 1e-14,
        value=worst_red, threshold=1e-14,
        detail="max relative difference coeffs_general(theta=0) vs coeffs_apsidal"))

    # 4. truncation order of the consistent kernel
    audit = truncation_audit((0.04, 0.08, 0.16), 0.2, max(e_j, 0.1), 0.7, 0.3, grid)
    orders = {f.kind: f.order for f in audit}
    leg = orders[KernelKind.LEGENDRE]
    rep.hard_checks.append(CheckResult(
        name="truncation_order_consistent", passed=abs(leg - 4.0) <= 0.3,
        value=leg, threshold=0.3, detail="fitted order of the legendre kernel vs exact"))
    rep.findings.append({
        "name": "cross_term_variant",
        "summary": "kernel truncation orders: the binomial (3/4) cross-term variant "
                   "reaches quartic convergence, the halved (3/8) variant does not; "
                   "the consistent expansion is the legendre kernel",
        "orders": {k.value: v for k, v in orders.items() if k is not KernelKind.EXACT},
    })

    # 5. recovery residual order against the small-inclination closed form
    rec = recovery_report(a, 0.2, e_j, 0.7, (0.4, 0.2, 0.1, 0.05), grid)
    rep.hard_checks.append(CheckResult(
        name="recovery_residual_order", passed=abs(rec.convergence_order - 2.0) <= 0.3,
        value=rec.convergence_order, threshold=0.3,
        detail="harmonic residual slope vs (1 - cos i), small-inclination closed form"))

    # 6. definiteness agreement between recovery and closed forms on the
    #    default (small a e e_J / (1 - cos i)) box where all forms are valid
    agree = True
    detail_pts = []
    for e in (0.03, 0.09):
        for inc in (0.3, 0.7, 1.1):
            for theta in (0.0, math.pi / 2.0, math.pi):
                qr = recover_quadratic_form(a, e, e_j, theta, inc, grid)
                p = SecularParams.make(a, e, e_j, theta=theta, inc=inc)
                vg = stability_verdict(coeffs_general(p)).positive_definite
                vr = stability_verdict(qr).positive_definite
                if vg != vr:
                    agree = False
                    detail_pts.append({"e": e, "inc": inc, "theta": theta,
                                       "closed": vg, "recovered": vr})
    rep.hard_checks.append(CheckResult(
        name="recovery_verdict_agreement", passed=agree,
        value=float(len(detail_pts)), threshold=0.0,
        detail="positive-definiteness verdicts, recovered vs general closed form, "
               "18-point reference box"))

    # findings: normalization factor of the small-inclination form
    qr2 = recover_quadratic_form(a, 0.05, e_j, 0.9, 0.05, grid,
                                 Normalization.POINCARE, KernelKind.LEGENDRE)
    p = SecularParams.make(a, 0.05, e_j, theta=0.9, inc=0.05)
    q5 = coeffs_small_inclination(p)
    rep.findings.append({
        "name": "small_inclination_normalization",
        "summary": "the small-inclination closed form matches the shell recovery "
                   "under the poincare radius (2 G (1 - cos i)); under the "
                   "half-poincare radius it differs by exactly 2",
        "ratio_poincare": qr2.a_bar / q5.a_bar,
    })

    # findings: finite-inclination closed forms vs the oracle
    mism = []
    for inc in (0.2, 0.6, 1.0):
        qr = recover_quadratic_form(a, e_star, e_j, 0.0, inc, grid)
        pa = SecularParams.make(a, e_star, e_j, theta=0.0, inc=inc)
        qa = coeffs_apsidal(pa)
        mism.append({"inc": inc, "recovered_a": qr.a_bar, "closed_a": qa.a_bar,
                     "ratio": qr.a_bar / qa.a_bar})
    rng_pd = np.random.default_rng(seed)
    bad_g, first_g = pd_violations(Regime.GENERAL, 4000, rng_pd)
    bad_s, _ = pd_violations(Regime.SMALL_INCLINATION, 4000,
                             np.random.default_rng(seed))
    rep.findings.append({
        "name": "finite_inclination_forms_mismatch",
        "summary": "the finite-inclination closed forms (general and aligned "
                   "regimes) disagree with the shell recovery at finite "
                   "inclination; their third-order terms carry an unbounded "
                   "1/(1 - cos i) factor and the forms lose positive "
                   "definiteness on the wide parameter box, while the "
                   "recovered form and the small-inclination form stay "
                   "positive definite",
        "recovered_vs_aligned": mism,
        "wide_box_violation_fraction_general": bad_g / 4000.0,
        "wide_box_violation_fraction_small_inclination": bad_s / 4000.0,
        "first_general_violation": first_g,
    })

    # findings: sixth-order sign of the transcribed determinants
    p6 = SecularParams.make(0.1, 0.3, 0.4, theta=0.8, inc=0.7)
    qg = coeffs_general(p6)
    t4, t5, t6 = det_general_terms(p6)
    gap_g = det_general(p6) - qg.det
    q5b = coeffs_small_inclination(p6)
    s4, s5, s6 = det_small_inclination_terms(p6)
    gap_s = det_small_inclination(p6) - q5b.det
    rep.findings.append({
        "name": "determinant_sixth_order_sign",
        "summary": "both transcribed determinant polynomials differ from "
                   "Abar Cbar - Bbar^2 of their coefficient triples by exactly "
                   "twice their sixth-order term (a sign slip at that order)",
        "general_gap_over_2t6": gap_g / (2.0 * t6),
        "small_inclination_gap_over_2t6": gap_s / (2.0 * s6),
    })

    # findings: adjudication of the small-inclination limit factor
    lim = []
    for inc in (0.2, 0.1, 0.05):
        qr = recover_quadratic_form(a, e_star, e_j, 0.0, inc, grid,
                                    Normalization.POINCARE, KernelKind.LEGENDRE)
        p5 = SecularParams.make(a, e_star, e_j, theta=0.0, inc=inc)
        lim.append({"inc": inc,
                    "recovered_over_small_inclination":
                        qr.a_bar / coeffs_small_inclination(p5).a_bar,
                    "recovered_over_general":
                        qr.a_bar / coeffs_general(p5).a_bar})
    rep.findings.append({
        "name": "small_inclination_limit_factor",
        "summary": "as the inclination shrinks the recovery converges to the "
                   "small-inclination closed form (leading factor 3/4); the "
                   "zero-inclination limit of the general form (leading factor "
                   "1/2) does not match",
        "ladder": lim,
    })
    return rep
