"""Perturbing-potential kernels.

The canonical scalar everywhere is the positive interaction kernel
K = 1 / |r - r_J|.  Truncated variants approximate K through third order
in the separation ratio; the secular Hamiltonian used by the flow
modules is H_sec = -Kbar, so the figure level values equal +Kbar.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .elements import InertialPosition
from .errors import SingularityError


class KernelKind(str, Enum):
    """Which interaction kernel to evaluate.

    EXACT is 1/Delta.  LEGENDRE is the binomial expansion of
    (1 + M)^(-1/2) with every term beyond third order in the separation
    ratio dropped.  CROSS_HALVED is an audit variant that carries the
    cross term (3/8) M1 M2 instead of the binomial (3/4) M1 M2; the
    validation suite measures which variant reaches quartic convergence.
    """

    EXACT = "exact"
    LEGENDRE = "legendre"
    CROSS_HALVED = "cross-halved"


@dataclass(frozen=True)
class InteractionTerms:
    """Dimensionless expansion variables of the interaction kernel.

    m1 = |r|^2 / r_J^2, m2 = -2 (x x_J + y y_J) / r_J^2, m = m1 + m2,
    and the exact identity Delta^2 = r_J^2 (1 + m) holds.
    """

    m1: float
    m2: float
    m: float
    r_j: float


def exact_kernel(asteroid: InertialPosition, planet):
    """Positive interaction kernel 1/Delta between the body and the perturber."""
    x_j, y_j = planet
    d2 = (asteroid.x - x_j) ** 2 + (asteroid.y - y_j) ** 2 + asteroid.z**2
    if np.any(np.asarray(d2) == 0.0):
        raise SingularityError("bodies coincide: interaction kernel is singular")
    return 1.0 / np.sqrt(d2)


def indirect_term(asteroid: InertialPosition, E_J, e_J):
    """Indirect part x xdd_J + y ydd_J of the perturbing potential.

    The perturber acceleration is the two-body one, xdd_J = -x_J / r_J^3
    (GM_total = 1, a_J = 1).  Its double average vanishes; the oracle
    module verifies this numerically.
    """
    x_j = np.cos(E_J) - e_J
    y_j = np.sqrt(1.0 - e_J * e_J) * np.sin(E_J)
    r_j3 = (x_j * x_j + y_j * y_j) ** 1.5
    return -(asteroid.x * x_j + asteroid.y * y_j) / r_j3


def m_terms(asteroid: InertialPosition, planet) -> InteractionTerms:
    """Expansion variables for the configuration; requires r_J > 0."""
    x_j, y_j = planet
    r_j2 = x_j * x_j + y_j * y_j
    if np.any(np.asarray(r_j2) == 0.0):
        raise SingularityError("perturber at the origin: m-terms undefined")
    m1 = (asteroid.x**2 + asteroid.y**2 + asteroid.z**2) / r_j2
    m2 = -2.0 * (asteroid.x * x_j + asteroid.y * y_j) / r_j2
    return InteractionTerms(m1=m1, m2=m2, m=m1 + m2, r_j=np.sqrt(r_j2))


def truncated_kernel(t: InteractionTerms, kind: KernelKind = KernelKind.LEGENDRE):
    """Evaluate the selected kernel from pre-computed interaction terms.

    LEGENDRE:     (1/r_J)(1 - m/2 + (3/4) m1 m2 + (3/8) m2^2 - (5/16) m2^3),
                  i.e. (1 - m/2 + (3/8) m^2 - (5/16) m^3) with all terms of
                  order above (|r|/r_J)^3 dropped.
    CROSS_HALVED: same but with (3/8) m1 m2.
    EXACT:        1/(r_J sqrt(1 + m)), algebraically equal to 1/Delta.

    A RuntimeWarning is emitted when |m2| >= 1 or |m| >= 1, where the
    expansion no longer converges.
    """
    kind = KernelKind(kind)
    if kind is KernelKind.EXACT:
        return 1.0 / (t.r_j * np.sqrt(1.0 + t.m))
    if np.any(np.abs(np.asarray(t.m2)) >= 1.0) or np.any(np.abs(np.asarray(t.m)) >= 1.0):
        warnings.warn(
            "interaction terms outside the expansion's convergence region (|m2| or |m| >= 1)",
            RuntimeWarning,
            stacklevel=2,
        )
    cross = 0.75 if kind is KernelKind.LEGENDRE else 0.375
    series = 1.0 - 0.5 * t.m + cross * t.m1 * t.m2 + 0.375 * t.m2**2 - 0.3125 * t.m2**3
    return series / t.r_j
