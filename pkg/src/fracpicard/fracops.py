"""Discrete fractional calculus on uniform grids.

Two operators live here: the Riemann-Liouville fractional integral,
discretised by product-trapezoidal quadrature (exact on piecewise-linear
integrands, which is what grid functions are), and the L1 backward
approximation of the Caputo derivative, used to verify solutions after
the fact.  The solver itself never differentiates; it only integrates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .grid import GridFunction, UniformGrid

__all__ = ["FracWeights", "build_weights", "frac_integral", "caputo_l1"]


@dataclass(frozen=True)
class FracWeights:
    """Quadrature weights for the fractional integral on one grid.

    ``w`` is a read-only lower-triangular ``(n + 1, n + 1)`` matrix; row
    ``k`` integrates a piecewise-linear interpolant from ``0`` to ``t_k``
    against the kernel ``(t_k - s)**(alpha - 1) / Gamma(alpha)``.  Row 0
    is identically zero.
    """

    alpha: float
    grid: UniformGrid
    w: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.w.flags.writeable = False


def build_weights(alpha: float, grid: UniformGrid) -> FracWeights:
    """Product-trapezoidal weights for order-``alpha`` fractional integration.

    On each panel ``[t_j, t_{j+1}]`` the integrand is replaced by its
    linear interpolant and the kernel moment is integrated exactly, which
    gives row ``k`` the closed form (with ``c = h**alpha / Gamma(alpha+2)``
    and ``m = k - j``):

    * column 0: ``c * ((k-1)**(alpha+1) - (k-1-alpha) * k**alpha)``
    * columns 1..k-1: ``c * ((m+1)**(alpha+1) - 2*m**(alpha+1) + (m-1)**(alpha+1))``
    * column k: ``c``

    Every weight is positive and row ``k`` sums to
    ``t_k**alpha / Gamma(alpha + 1)``, the integral of the kernel itself.

    Args:
        alpha: integration order in ``(0, 1)``.
        grid: the uniform grid to build weights for.

    Returns:
        A ``FracWeights`` bundle for use with ``frac_integral``.
    """
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"build_weights requires alpha in (0, 1), got {alpha}")
    n = grid.n
    h = grid.h
    ap1 = alpha + 1.0
    c = h**alpha / math.gamma(alpha + 2.0)

    w = np.zeros((n + 1, n + 1))
    k = np.arange(1, n + 1, dtype=float)
    # First column: the panel [t_0, t_1] contributes a boundary moment.
    w[1:, 0] = c * ((k - 1.0) ** ap1 - (k - 1.0 - alpha) * k**alpha)
    # Interior columns depend only on m = k - j; fill along diagonals.
    m = np.arange(1, n, dtype=float)
    interior = c * ((m + 1.0) ** ap1 - 2.0 * m**ap1 + (m - 1.0) ** ap1)
    for kk in range(2, n + 1):
        w[kk, 1:kk] = interior[kk - 2 :: -1]
    # Diagonal: the newest node always carries weight c.
    w[np.arange(1, n + 1), np.arange(1, n + 1)] = c
    return FracWeights(alpha=alpha, grid=grid, w=w)


def frac_integral(weights: FracWeights, z: GridFunction) -> GridFunction:
    """Apply the fractional integral to a grid function.

    Node ``k`` of the result approximates
    ``(1 / Gamma(alpha)) * integral_0^{t_k} (t_k - s)**(alpha-1) z(s) ds``;
    node 0 is exactly zero.

    Args:
        weights: weights built on the same grid as ``z``.
        z: the integrand samples.

    Returns:
        The integral samples, on the same grid with the same dimension.
    """
    if weights.grid != z.grid:
        raise DomainError(
            f"weights were built for grid (T={weights.grid.T}, n={weights.grid.n}), "
            f"got values on (T={z.grid.T}, n={z.grid.n})"
        )
    return GridFunction(z.grid, weights.w @ z.values)


def caputo_l1(alpha: float, x: GridFunction) -> GridFunction:
    """L1 approximation of the Caputo derivative of order ``alpha``.

    Node ``k >= 1`` uses backward differences of ``x`` weighted by the
    exact kernel moments of each panel:

    ``(h**-alpha / Gamma(2-alpha)) * sum_j (x_{j+1} - x_j) *
    ((k-j)**(1-alpha) - (k-j-1)**(1-alpha))``

    The derivative at node 0 is not defined by this stencil; the result
    copies node 1 there, and consumers that score residuals skip node 0.
    A constant ``x`` maps to exactly zero, and ``x(t) = t`` maps to
    ``t**(1-alpha) / Gamma(2-alpha)`` up to rounding.

    Args:
        alpha: derivative order in ``(0, 1)``.
        x: samples of the function to differentiate.

    Returns:
        Samples of the approximate Caputo derivative.
    """
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"caputo_l1 requires alpha in (0, 1), got {alpha}")
    n = x.grid.n
    h = x.grid.h
    scale = h**-alpha / math.gamma(2.0 - alpha)
    # coef[i] = (i+1)**(1-alpha) - i**(1-alpha); index i = k - j - 1.
    i = np.arange(0, n, dtype=float)
    coef = (i + 1.0) ** (1.0 - alpha) - i ** (1.0 - alpha)
    dx = np.diff(x.values, axis=0)  # shape (n, d)

    out = np.empty_like(x.values)
    for k in range(1, n + 1):
        out[k] = scale * (coef[k - 1 :: -1][None, :] @ dx[:k])[0]
    out[0] = out[1]
    return GridFunction(x.grid, out)
