"""Command-line surface.

Subcommands: equilibrium, figures, stability, validate, coeffs,
portrait.  All commands are deterministic given the resolved
configuration (a flat key = value file plus flag overrides, flags
winning); emitted CSV files carry a header row, a fixed column order
and 17-significant-digit floats, so reruns are byte identical.

Exit codes: 0 success, 1 validation hard-check failure, 2 domain error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .averaging import QuadratureGrid
from .dynamics import (
    Classification,
    level_curve,
    separatrix_level,
    theta_e_of_state,
    PlanarState,
    w_portrait,
)
from .elements import Normalization
from .errors import DomainError
from .oracle import run_validation
from .potential import KernelKind
from .secular import (
    QuadraticForm2,
    Regime,
    SecularParams,
    coeffs_apsidal,
    coeffs_general,
    coeffs_small_inclination,
    equilibrium_eccentricity,
    rbar_series,
    stability_verdict,
)

DEFAULT_LEVELS = (
    1.002872548,
    1.002872843,
    1.002873713,
    1.002875125,
    1.002878129,
    1.002879903,
    1.002881952,
    1.002885001,
)


@dataclass(frozen=True)
class RunConfig:
    """Resolved run configuration; defaults reproduce the reference setup
    a = 0.1, e_j = 0.3."""

    a: float = 0.1
    e_j: float = 0.3
    n_e: int = 256
    n_ej: int = 256
    levels: tuple = DEFAULT_LEVELS
    inclinations: tuple = (0.1, 0.3, 0.6, 1.0, 1.4)
    portrait_inclination: float = 0.5
    n_ellipses: int = 6
    n_portrait_samples: int = 8
    output_dir: str = "."
    seed: int = 12345
    kernel: str = KernelKind.LEGENDRE.value
    normalization: str = Normalization.POINCARE.value
    sweep_points: int = 10000
    sweep_e_max: float = 0.1
    sweep_i_min: float = 0.3
    sweep_i_max: float = 1.4

    def __post_init__(self):
        if not 0.0 < self.a < 1.0:
            raise DomainError("a must lie in (0, 1)")
        if not 0.0 <= self.e_j < 1.0:
            raise DomainError("e_j must lie in [0, 1)")
        if self.n_e < 8 or self.n_ej < 8:
            raise DomainError("grid sizes must be at least 8")
        if not 0.0 < self.portrait_inclination < math.pi:
            raise DomainError("portrait_inclination must lie in (0, pi)")
        if self.sweep_points < 1 or self.n_ellipses < 1 or self.n_portrait_samples < 1:
            raise DomainError("counts must be positive")
        if not 0.0 < self.sweep_e_max < 1.0:
            raise DomainError("sweep_e_max must lie in (0, 1)")
        if not 0.0 < self.sweep_i_min <= self.sweep_i_max < math.pi:
            raise DomainError("sweep inclination range must satisfy 0 < min <= max < pi")
        KernelKind(self.kernel)
        Normalization(self.normalization)

    @property
    def grid(self) -> QuadratureGrid:
        return QuadratureGrid(self.n_e, self.n_ej)


_FLOAT_KEYS = {"a", "e_j", "portrait_inclination", "sweep_e_max", "sweep_i_min",
               "sweep_i_max"}
_INT_KEYS = {"n_e", "n_ej", "seed", "sweep_points", "n_ellipses", "n_portrait_samples"}
_LIST_KEYS = {"levels", "inclinations"}
_STR_KEYS = {"output_dir", "kernel", "normalization"}


def parse_config_file(path) -> dict:
    """Parse the flat key = value grammar ('#' comments, commas in lists)."""
    raw = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise DomainError(f"{path}:{lineno}: expected 'key = value'")
            key, val = (part.strip() for part in body.split("=", 1))
            if key in _FLOAT_KEYS:
                raw[key] = float(val)
            elif key in _INT_KEYS:
                raw[key] = int(val)
            elif key in _LIST_KEYS:
                raw[key] = tuple(float(tok) for tok in val.split(",") if tok.strip())
            elif key in _STR_KEYS:
                raw[key] = val
            else:
                raise DomainError(f"{path}:{lineno}: unknown key {key!r}")
    return raw


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def _resolved(cfg: RunConfig) -> dict:
    out = dataclasses.asdict(cfg)
    out["levels"] = list(out["levels"])
    out["inclinations"] = list(out["inclinations"])
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_equilibrium(cfg: RunConfig, args) -> int:
    e_star = equilibrium_eccentricity(cfg.a, cfg.e_j)
    g = math.sqrt(cfg.a) * math.sqrt(1.0 - e_star * e_star)
    level = -float(rbar_series(cfg.a, e_star, cfg.e_j, 0.0))
    payload = {"a": cfg.a, "e_j": cfg.e_j, "e_star": e_star, "G": g, "level": level}
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(f"aligned equilibrium for a={_fmt(cfg.a)}, e_j={_fmt(cfg.e_j)}")
        print(f"  e*    = {_fmt(e_star)}")
        print(f"  G     = {_fmt(g)}")
        print(f"  level = {_fmt(level)}")
    return 0


def _conic_rows(qf: QuadraticForm2, radius, curve_id, n_angles=256):
    """Boundary of the form's level set through (radius, 0)."""
    w = 0.5 * qf.a_bar * radius * radius
    phi = 2.0 * np.pi * np.arange(n_angles) / n_angles
    c, s = np.cos(phi), np.sin(phi)
    denom = qf.a_bar * c * c - 2.0 * qf.b_bar * c * s + qf.c_bar * s * s
    if np.any(denom <= 0.0):
        raise DomainError("form is not positive definite; no closed level curve")
    r = np.sqrt(2.0 * w / denom)
    return [(curve_id, float(rp * cp), float(-rp * sp)) for rp, cp, sp in zip(r, c, s)]


def cmd_figures(cfg: RunConfig, args) -> int:
    os.makedirs(cfg.output_dir, exist_ok=True)
    classifications = {}
    periods = {}
    fig2_rows = []
    for k, level in enumerate(cfg.levels):
        traj = level_curve(level, cfg.a, cfg.e_j)
        name = f"R{k}"
        classifications[name] = traj.classification.value
        periods[name] = traj.period
        for row in traj.samples:
            th, e = theta_e_of_state(PlanarState(row[1], row[2]), cfg.a)
            fig2_rows.append((float(traj.level), th, e))
    _write_csv(os.path.join(cfg.output_dir, "fig2_levels.csv"),
               ("level", "theta", "e"), fig2_rows)

    e_star = equilibrium_eccentricity(cfg.a, cfg.e_j)
    params = SecularParams.make(cfg.a, e_star, cfg.e_j, theta=0.0,
                                inc=cfg.portrait_inclination)
    qf = coeffs_apsidal(params)
    kappa = 2.0 if Normalization(cfg.normalization) is Normalization.POINCARE else 1.0
    r_shell = math.sqrt(kappa * params.G * (1.0 - math.cos(cfg.portrait_inclination)))
    fig3_rows = []
    for j in range(cfg.n_ellipses):
        fig3_rows.extend(_conic_rows(qf, r_shell * (j + 1) / cfg.n_ellipses, j))
    _write_csv(os.path.join(cfg.output_dir, "fig3.csv"), ("curve_id", "p3", "q3"),
               fig3_rows)

    spreads = {}
    for fname, level_idx in (("fig4.csv", 1), ("fig5.csv", 7)):
        traj = level_curve(cfg.levels[level_idx], cfg.a, cfg.e_j)
        port = w_portrait(traj, cfg.portrait_inclination, cfg.n_portrait_samples,
                          cfg.a, cfg.e_j, normalization=cfg.normalization)
        rows = []
        for cid, curve in enumerate(port.curves):
            rows.extend((cid, float(p), float(q)) for p, q in curve.samples)
        _write_csv(os.path.join(cfg.output_dir, fname), ("curve_id", "p3", "q3"), rows)
        spreads[fname] = port.spread

    manifest = {
        "config": _resolved(cfg),
        "equilibrium_eccentricity": e_star,
        "separatrix_level": separatrix_level(cfg.a, cfg.e_j),
        "classifications": classifications,
        "periods": periods,
        "portrait_spreads": spreads,
        "files": ["fig2_levels.csv", "fig3.csv", "fig4.csv", "fig5.csv"],
    }
    path = os.path.join(cfg.output_dir, "figures_manifest.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if not args.json:
        print(f"wrote figure data to {cfg.output_dir}")
        for name in sorted(classifications):
            print(f"  {name}: {classifications[name]}")
    else:
        print(json.dumps(manifest, sort_keys=True))
    return 0


def cmd_stability(cfg: RunConfig, args) -> int:
    rng = np.random.default_rng(cfg.seed)
    rows = []
    violations = 0
    min_det = math.inf
    for _ in range(cfg.sweep_points):
        e = rng.uniform(1e-6, cfg.sweep_e_max)
        e_j = rng.uniform(0.0, cfg.e_j)
        theta = rng.uniform(0.0, 2.0 * math.pi)
        inc = rng.uniform(cfg.sweep_i_min, cfg.sweep_i_max)
        p = SecularParams.make(cfg.a, e, e_j, theta=theta, inc=inc)
        for regime, qf in (("general", coeffs_general(p)),
                           ("apsidal", coeffs_apsidal(
                               SecularParams.make(cfg.a, e, e_j, theta=0.0, inc=inc)))):
            v = stability_verdict(qf)
            min_det = min(min_det, v.det_value)
            if not v.positive_definite:
                violations += 1
            rows.append((regime, e, e_j, theta, inc, qf.a_bar, qf.b_bar, qf.c_bar,
                         v.det_value, int(v.positive_definite)))
    injected = 0
    if args.inject_indefinite:
        bad = QuadraticForm2(a_bar=1.0, b_bar=2.0, c_bar=1.0, regime=Regime.GENERAL)
        v = stability_verdict(bad)
        if not v.positive_definite:
            violations += 1
            injected = 1
        rows.append(("injected", 0.0, 0.0, 0.0, 0.0, bad.a_bar, bad.b_bar, bad.c_bar,
                     v.det_value, int(v.positive_definite)))
    os.makedirs(cfg.output_dir, exist_ok=True)
    _write_csv(os.path.join(cfg.output_dir, "stability_sweep.csv"),
               ("regime", "e", "e_j", "theta", "inc", "a_bar", "b_bar", "c_bar",
                "det", "positive_definite"),
               rows)
    summary = {
        "config": _resolved(cfg),
        "points": cfg.sweep_points,
        "violations": violations,
        "injected_violations": injected,
        "min_det": min_det,
    }
    if args.json:
        print(json.dumps(summary, sort_keys=True))
    else:
        print(f"stability sweep: {cfg.sweep_points} points, "
              f"{violations} violations (injected: {injected}), "
              f"min det = {_fmt(min_det)}")
    return 0


def cmd_validate(cfg: RunConfig, args) -> int:
    rep = run_validation(a=cfg.a, e_j=cfg.e_j, grid=cfg.grid,
                         inclinations=cfg.inclinations, seed=cfg.seed,
                         corrupt_closed_form=args.corrupt_closed_form)
    if args.json:
        print(json.dumps(rep.to_dict(), sort_keys=True, default=float))
    else:
        for c in rep.hard_checks:
            mark = "PASS" if c.passed else "FAIL"
            print(f"[{mark}] {c.name}: value={c.value:.3e} threshold={c.threshold:.3e} ({c.detail})")
        for w in rep.warnings:
            print(f"[warn] {w}")
        print(f"findings: {len(rep.findings)}")
        for f in rep.findings:
            print(f"  - {f['name']}: {f['summary']}")
    return 0 if rep.passed else 1


_REGIMES = {"apsidal": Regime.APSIDAL, "small-i": Regime.SMALL_INCLINATION,
            "general": Regime.GENERAL}


def cmd_coeffs(cfg: RunConfig, args) -> int:
    regime = _REGIMES[args.regime]
    e = args.e if args.e is not None else equilibrium_eccentricity(cfg.a, cfg.e_j)
    p = SecularParams.make(cfg.a, e, cfg.e_j, theta=args.theta, inc=args.inc)
    fn = {Regime.APSIDAL: coeffs_apsidal,
          Regime.SMALL_INCLINATION: coeffs_small_inclination,
          Regime.GENERAL: coeffs_general}[regime]
    qf = fn(p)
    v = stability_verdict(qf)
    payload = {
        "regime": qf.regime.value,
        "params": {"a": cfg.a, "e": e, "e_j": cfg.e_j, "theta": args.theta,
                   "inc": args.inc, "G": p.G},
        "a_bar": qf.a_bar, "b_bar": qf.b_bar, "c_bar": qf.c_bar,
        "det": v.det_value, "positive_definite": v.positive_definite,
    }
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(f"{qf.regime.value} coefficients at e={_fmt(e)}, theta={_fmt(args.theta)}, "
              f"inc={_fmt(args.inc)}:")
        print(f"  a_bar = {_fmt(qf.a_bar)}")
        print(f"  b_bar = {_fmt(qf.b_bar)}")
        print(f"  c_bar = {_fmt(qf.c_bar)}")
        print(f"  det   = {_fmt(v.det_value)}  positive definite: {v.positive_definite}")
    return 0


def cmd_portrait(cfg: RunConfig, args) -> int:
    traj = level_curve(args.level, cfg.a, cfg.e_j)
    os.makedirs(cfg.output_dir, exist_ok=True)
    rows = []
    for row in traj.samples:
        th, e = theta_e_of_state(PlanarState(row[1], row[2]), cfg.a)
        rows.append((float(traj.level), th, e))
    _write_csv(os.path.join(cfg.output_dir, "portrait.csv"), ("level", "theta", "e"),
               rows)
    summary = {
        "level": traj.level,
        "classification": traj.classification.value,
        "period": traj.period,
        "winding": traj.winding,
        "max_abs_theta": traj.max_abs_theta,
        "level_drift": traj.level_drift,
    }
    if args.json:
        print(json.dumps(summary, sort_keys=True))
    else:
        print(f"level {_fmt(traj.level)}: {traj.classification.value}, "
              f"period={traj.period}, winding={_fmt(traj.winding)}")
    return 0


# ---------------------------------------------------------------------------
# argument plumbing


def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key = value configuration file")
    p.add_argument("--a", type=float, dest="a")
    p.add_argument("--e-j", type=float, dest="e_j")
    p.add_argument("--grid", type=int, help="set both anomaly grids to N")
    p.add_argument("--n-e", type=int, dest="n_e")
    p.add_argument("--n-ej", type=int, dest="n_ej")
    p.add_argument("--levels", help="comma-separated level values")
    p.add_argument("--inclinations", help="comma-separated inclinations (rad)")
    p.add_argument("--portrait-inclination", type=float, dest="portrait_inclination")
    p.add_argument("--output-dir", dest="output_dir")
    p.add_argument("--seed", type=int, dest="seed")
    p.add_argument("--kernel", choices=[k.value for k in KernelKind], dest="kernel")
    p.add_argument("--normalization", choices=[n.value for n in Normalization],
                   dest="normalization")
    p.add_argument("--sweep-points", type=int, dest="sweep_points")
    p.add_argument("--sweep-e-max", type=float, dest="sweep_e_max")
    p.add_argument("--sweep-i-min", type=float, dest="sweep_i_min")
    p.add_argument("--sweep-i-max", type=float, dest="sweep_i_max")
    p.add_argument("--json", action="store_true", help="machine-readable output")


def build_config(args) -> RunConfig:
    raw = parse_config_file(args.config) if args.config else {}
    field_names = {f.name for f in dataclasses.fields(RunConfig)}
    for name in field_names:
        val = getattr(args, name, None)
        if val is not None:
            raw[name] = val
    if getattr(args, "grid", None) is not None:
        raw["n_e"] = raw["n_ej"] = args.grid
    for key in ("levels", "inclinations"):
        if isinstance(raw.get(key), str):
            raw[key] = tuple(float(tok) for tok in raw[key].split(",") if tok.strip())
    return RunConfig(**raw)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="secular3bp",
        description="Double-averaged inner elliptic restricted three-body problem: "
                    "secular levels, stability forms and validation oracle.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eq = sub.add_parser("equilibrium", help="aligned equilibrium eccentricity and level")
    p_fig = sub.add_parser("figures", help="emit level-curve and portrait data files")
    p_st = sub.add_parser("stability", help="random stability sweep over the closed forms")
    p_st.add_argument("--inject-indefinite", action="store_true",
                      help="negative control: append a known indefinite form")
    p_val = sub.add_parser("validate", help="run the oracle validation suite")
    p_val.add_argument("--corrupt-closed-form", action="store_true",
                       help="negative control: corrupt a closed form before checking")
    p_co = sub.add_parser("coeffs", help="evaluate one closed-form coefficient triple")
    p_co.add_argument("--regime", choices=sorted(_REGIMES), required=True)
    p_co.add_argument("--e", type=float, default=None,
                      help="eccentricity (default: equilibrium value)")
    p_co.add_argument("--theta", type=float, default=0.0)
    p_co.add_argument("--inc", type=float, default=0.5)
    p_po = sub.add_parser("portrait", help="emit a single planar level curve")
    p_po.add_argument("--level", type=float, required=True)

    for p in (p_eq, p_fig, p_st, p_val, p_co, p_po):
        _add_config_flags(p)

    args = parser.parse_args(argv)
    handlers = {
        "equilibrium": cmd_equilibrium,
        "figures": cmd_figures,
        "stability": cmd_stability,
        "validate": cmd_validate,
        "coeffs": cmd_coeffs,
        "portrait": cmd_portrait,
    }
    try:
        cfg = build_config(args)
        return handlers[args.command](cfg, args)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
