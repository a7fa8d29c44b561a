"""Reference computations that share no code with the package."""

import math
from fractions import Fraction

import mpmath
import numpy as np


def brute_force_lbe(values):
    """All-pairs half-distance in exact rationals, rounded up to binary64.

    The first pair (lexicographically) attaining the largest rounded value is
    reported.
    """
    k, m = values.shape
    zeta, pairs = [], []
    for n in range(m):
        best, arg = -1.0, None
        for i in range(k):
            for j in range(i + 1, k):
                h = abs(Fraction(float(values[i, n])) - Fraction(float(values[j, n]))) / 2
                z = float(h)
                if Fraction(z) < h:
                    z = math.nextafter(z, math.inf)
                if z > best:
                    best, arg = z, (i, j)
        zeta.append(best)
        pairs.append(arg)
    return np.array(zeta), pairs


def sine_reference_orbit(x0, n_steps, prec=256):
    """Orbit of y <- 2.6868 y - 0.2462 y^3 in ``prec``-bit arithmetic."""
    with mpmath.workprec(prec):
        a = mpmath.mpf(26868) / 10000
        b = mpmath.mpf(2462) / 10000
        y = mpmath.mpf(x0)
        out = [y]
        for _ in range(n_steps):
            y = a * y - b * y**3
            out.append(y)
    return out
