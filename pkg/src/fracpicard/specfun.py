"""Special functions used by the solver: Gamma and one-parameter Mittag-Leffler.

The Mittag-Leffler function is the scale against which all convergence
control in this package is measured: the weighted norm that makes the
fixed-point map a contraction divides by ``E_alpha(theta * t**alpha)``.
Evaluation sticks to the regime those weights live in (moderate positive
arguments, ``alpha`` in ``(0, 1]``), where the defining power series with
compensated summation is accurate and cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, SeriesConvergenceError

__all__ = ["SeriesControl", "gamma", "mittag_leffler", "bielecki_weight"]

# Series termination requires this many consecutive below-tolerance terms,
# guarding against a term that dips early while the tail is still growing.
_QUIET_TERMS = 3

# math.gamma overflows just past 171.6; treat that as the domain edge.
_GAMMA_MAX = 171.0


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the Mittag-Leffler power series.

    Attributes:
        rel_tol: relative tail tolerance; a term is negligible once its
            magnitude falls below ``rel_tol`` times the partial sum.
        max_terms: hard cap on the number of series terms.
    """

    rel_tol: float = 1e-14
    max_terms: int = 400

    def __post_init__(self):
        if not (0.0 < self.rel_tol < 1e-6):
            raise DomainError(f"rel_tol must lie in (0, 1e-6), got {self.rel_tol}")
        if self.max_terms < 50:
            raise DomainError(f"max_terms must be at least 50, got {self.max_terms}")


def gamma(x: float) -> float:
    """Gamma function on the positive real axis.

    Args:
        x: argument in ``(0, 171]``; values above overflow a float64.

    Returns:
        ``Gamma(x)``.

    Raises:
        DomainError: if ``x <= 0`` or ``x > 171``.
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"gamma requires x > 0, got {x}")
    if x > _GAMMA_MAX:
        raise DomainError(f"gamma overflows for x > {_GAMMA_MAX:g}, got {x}")
    return math.gamma(x)


def mittag_leffler(alpha: float, z: float, control: SeriesControl | None = None) -> float:
    """One-parameter Mittag-Leffler function ``E_alpha(z)``.

    Sums ``sum_k z**k / Gamma(alpha*k + 1)`` with Kahan-compensated
    accumulation.  Successive terms are generated by the running ratio
    ``term * z * exp(lgamma(alpha*k + 1) - lgamma(alpha*k + alpha + 1))``,
    which avoids forming huge powers and Gamma values separately.

    Args:
        alpha: order, in ``(0, 1]``.  ``alpha = 1`` reproduces ``exp``.
        z: argument, restricted to ``[-5, 200]``.  Within that window the
            series converges at working precision for the weight arguments
            this package produces; far outside it the truncated series is
            no longer trustworthy.
        control: optional truncation policy; defaults to
            ``SeriesControl()``.

    Returns:
        ``E_alpha(z)``.

    Raises:
        DomainError: if ``alpha`` or ``z`` is outside the stated domain.
        SeriesConvergenceError: if ``max_terms`` terms do not reach the
            tolerance (possible for small ``alpha`` with large ``z``).
    """
    alpha = float(alpha)
    z = float(z)
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"mittag_leffler requires alpha in (0, 1], got {alpha}")
    if not (-5.0 <= z <= 200.0):
        raise DomainError(f"mittag_leffler requires z in [-5, 200], got {z}")
    if control is None:
        control = SeriesControl()

    total = 0.0
    comp = 0.0  # Kahan compensation
    term = 1.0  # z**k / Gamma(alpha*k + 1) at k = 0
    quiet = 0
    for k in range(control.max_terms):
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        term *= z * math.exp(math.lgamma(alpha * k + 1.0) - math.lgamma(alpha * k + alpha + 1.0))
        if abs(term) < control.rel_tol * abs(total):
            quiet += 1
            if quiet >= _QUIET_TERMS:
                return total
        else:
            quiet = 0
    raise SeriesConvergenceError(
        f"Mittag-Leffler series for alpha={alpha}, z={z} did not settle "
        f"within {control.max_terms} terms"
    )


def bielecki_weight(alpha: float, theta: float, t: float) -> float:
    """Weight ``E_alpha(theta * t**alpha)`` of the exponentially scaled norm.

    Args:
        alpha: order in ``(0, 1]``.
        theta: scaling parameter, ``> 0``.
        t: time, ``>= 0``.

    Returns:
        The weight value; always ``>= 1``.
    """
    if theta <= 0.0:
        raise DomainError(f"bielecki_weight requires theta > 0, got {theta}")
    if t < 0.0:
        raise DomainError(f"bielecki_weight requires t >= 0, got {t}")
    return mittag_leffler(alpha, theta * t**alpha)
