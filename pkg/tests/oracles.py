"""Independent oracles the tests score the package against.

Everything here is written directly from defining formulas or textbook
schemes and shares no code with the package, so agreement is evidence
rather than tautology.  Keep it that way: no imports from fracpicard.
"""

import math

import numpy as np


def erfc_identity(z):
    """Half-order Mittag-Leffler through the closed form exp(z^2)*erfc(-z)."""
    return math.exp(z * z) * math.erfc(-z)


def ml_series(alpha, z, terms=200):
    """Plain-summation Mittag-Leffler series with per-term log evaluation.

    No compensated summation, no running ratios: each term is computed
    from scratch as exp(k*log|z| - lgamma(alpha*k + 1)).  Adequate for
    |z| up to a few tens, which covers every value the tests need.
    """
    if z == 0.0:
        return 1.0
    logz = math.log(abs(z))
    total = 0.0
    for k in range(terms):
        term = math.exp(k * logz - math.lgamma(alpha * k + 1.0))
        if z < 0.0 and k % 2 == 1:
            term = -term
        total += term
    return total


def frac_integral_power(alpha, beta, t):
    """Power rule: I^alpha t^beta = Gamma(beta+1)/Gamma(alpha+beta+1) * t^(alpha+beta)."""
    return math.gamma(beta + 1.0) / math.gamma(alpha + beta + 1.0) * t ** (alpha + beta)


def caputo_power(alpha, beta, t):
    """Power rule: D^alpha t^beta = Gamma(beta+1)/Gamma(beta+1-alpha) * t^(beta-alpha)."""
    return math.gamma(beta + 1.0) / math.gamma(beta + 1.0 - alpha) * t ** (beta - alpha)


def abm_solve(alpha, T, x0, F, n):
    """Explicit fractional initial-value problem by Adams predictor-corrector.

    Marches D^alpha x = F(t, x), x(0) = x0 node by node on a uniform
    grid: rectangle-rule predictor, then a single corrector evaluation
    per node.  This is a marching scheme with no global fixed-point
    iteration, which is what makes it an independent cross-check for the
    solver under test.

    Returns the array of node values, shape (n + 1,), scalar problems only.
    """
    h = T / n
    ts = np.linspace(0.0, T, n + 1)
    ga1 = math.gamma(alpha + 1.0)
    ga2 = math.gamma(alpha + 2.0)

    x = np.empty(n + 1)
    fv = np.empty(n + 1)
    x[0] = float(x0)
    fv[0] = F(ts[0], x[0])

    for k in range(1, n + 1):
        j = np.arange(k, dtype=float)
        b = ((k - j) ** alpha - (k - j - 1.0) ** alpha) * h**alpha / ga1
        x_pred = x[0] + float(b @ fv[:k])

        a = np.empty(k + 1)
        a[0] = (k - 1.0) ** (alpha + 1.0) - (k - 1.0 - alpha) * float(k) ** alpha
        if k > 1:
            m = k - j[1:]
            a[1:k] = (
                (m + 1.0) ** (alpha + 1.0)
                - 2.0 * m ** (alpha + 1.0)
                + (m - 1.0) ** (alpha + 1.0)
            )
        a[k] = 1.0
        a *= h**alpha / ga2

        x[k] = x[0] + float(a[:k] @ fv[:k]) + a[k] * F(ts[k], x_pred)
        fv[k] = F(ts[k], x[k])
    return x


def brute_hausdorff(A, B, dist):
    """Pompeiu-Hausdorff distance by the textbook max-min double loop."""

    def directed(P, Q):
        worst = 0.0
        for p in P:
            best = min(dist(p, q) for q in Q)
            worst = max(worst, best)
        return worst

    return max(directed(A, B), directed(B, A))
