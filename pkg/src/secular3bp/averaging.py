"""Double-averaging quadrature over the two eccentric anomalies.

Averages over both mean anomalies are evaluated in eccentric anomaly
with the exact Jacobian weight (1 - e cos E)(1 - e_J cos E_J) / (4 pi^2)
on a uniform tensor grid over [0, 2 pi)^2.  For smooth periodic
integrands the periodic rectangle rule is spectrally accurate, and the
fixed node set makes results bitwise reproducible within one build.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, QuadratureError

MAX_NODES = 4096


@dataclass(frozen=True)
class QuadratureGrid:
    """Node counts for the two anomaly directions (both >= 8)."""

    n_e: int = 256
    n_ej: int = 256

    def __post_init__(self):
        if self.n_e < 8 or self.n_ej < 8:
            raise DomainError("quadrature grids need at least 8 nodes per direction")

    def halved(self) -> "QuadratureGrid":
        return QuadratureGrid(self.n_e // 2, self.n_ej // 2)

    def doubled(self) -> "QuadratureGrid":
        return QuadratureGrid(self.n_e * 2, self.n_ej * 2)


@dataclass(frozen=True)
class AveragedValue:
    """Quadrature result with its half-grid error estimate."""

    value: float
    est_error: float
    converged: bool = True


def _nodes(e, n):
    E = 2.0 * np.pi * np.arange(n) / n
    return E, (1.0 - e * np.cos(E)) / n


def _raw_double(f, e, e_j, grid: QuadratureGrid) -> float:
    E, w_e = _nodes(e, grid.n_e)
    EJ, w_j = _nodes(e_j, grid.n_ej)
    vals = np.broadcast_to(np.asarray(f(E[:, None], EJ[None, :]), dtype=float),
                           (grid.n_e, grid.n_ej))
    if not np.all(np.isfinite(vals)):
        i, j = np.argwhere(~np.isfinite(vals))[0]
        raise QuadratureError(
            f"non-finite integrand sample at node (E={E[i]:.6f}, E_J={EJ[j]:.6f})"
        )
    return float(w_e @ (vals @ w_j))


def double_average(f, e, e_j, grid: QuadratureGrid = QuadratureGrid()) -> AveragedValue:
    """Average f(E, E_J) over both mean anomalies.

    Parameters
    ----------
    f : callable
        Integrand of the eccentric anomalies; receives broadcastable
        arrays of shapes (n_e, 1) and (1, n_ej) and must return values
        broadcastable to (n_e, n_ej).
    e, e_j : float
        Eccentricities in [0, 1), supplying the Jacobian weights.
    grid : QuadratureGrid
        Node counts; the error estimate compares with the halved grid.
    """
    if not (0.0 <= e < 1.0 and 0.0 <= e_j < 1.0):
        raise DomainError("eccentricities must lie in [0, 1)")
    value = _raw_double(f, e, e_j, grid)
    if grid.n_e >= 16 and grid.n_ej >= 16:
        est = abs(value - _raw_double(f, e, e_j, grid.halved()))
    else:
        est = float("inf")
    return AveragedValue(value=value, est_error=est)


def average_over_l(f, e, n=256) -> float:
    """Single average of f(E) over the mean anomaly via the anomaly Jacobian."""
    if not 0.0 <= e < 1.0:
        raise DomainError("eccentricity must lie in [0, 1)")
    E, w = _nodes(e, n)
    vals = np.broadcast_to(np.asarray(f(E), dtype=float), E.shape)
    if not np.all(np.isfinite(vals)):
        k = int(np.argwhere(~np.isfinite(vals))[0])
        raise QuadratureError(f"non-finite integrand sample at node E={E[k]:.6f}")
    return float(w @ vals)


def converge(f, e, e_j, tol, start: QuadratureGrid = QuadratureGrid(64, 64)) -> AveragedValue:
    """Double the grid until the half-grid estimate drops below tol.

    Returns the last value with its achieved estimate; if the estimate
    is still above tol at 4096 nodes per direction the result is flagged
    (converged=False) rather than raised.
    """
    if tol <= 0.0:
        raise DomainError("tolerance must be positive")
    grid = start
    while True:
        res = double_average(f, e, e_j, grid)
        if res.est_error < tol:
            return res
        if grid.n_e >= MAX_NODES or grid.n_ej >= MAX_NODES:
            return AveragedValue(value=res.value, est_error=res.est_error, converged=False)
        grid = grid.doubled()
