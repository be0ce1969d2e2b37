"""Independent numerical oracles used by the tests."""

import math
from fractions import Fraction
from functools import reduce

import numpy as np


def tri_c(t):
    return 4 * np.abs(np.mod(t, 1.0) - 0.5) - 1


def tri_s(t):
    return tri_c(np.asarray(t) + 0.75)


def _gen(bid):
    return tri_c if bid.kind.value == "cos" else tri_s


def _simpson_exact(fn, breaks):
    """Integral of a piecewise quadratic; Simpson is exact on each piece."""
    a, b = breaks[:-1], breaks[1:]
    m = (a + b) / 2
    return float(np.sum((b - a) / 6 * (fn(a) + 4 * fn(m) + fn(b))))


def quad_inner(id1, id2, grid=2000):
    """L2 inner product of two C/S basis functions on the unit cube by quadrature.

    Parallel frequencies reduce to a 1D integral along the common primitive
    direction, integrated exactly between breakpoints. Other pairs use a
    midpoint grid of ``grid**d`` points.
    """
    k1 = np.array(id1.index.entries)
    k2 = np.array(id2.index.entries)
    f1, f2 = _gen(id1), _gen(id2)
    g1 = reduce(math.gcd, map(int, np.abs(k1)))
    g2 = reduce(math.gcd, map(int, np.abs(k2)))
    e1, e2 = k1 // g1, k2 // g2
    if np.array_equal(e1, e2) or np.array_equal(e1, -e2):
        a, b = g1, g2 * (1 if np.array_equal(e1, e2) else -1)
        pts = {Fraction(j, 4 * a) for j in range(4 * a + 1)} | {Fraction(j, 4 * abs(b)) for j in range(4 * abs(b) + 1)}
        pts |= {Fraction(j, 4 * abs(b)) + Fraction(3, 4 * abs(b)) for j in range(-4, 4 * abs(b) + 1)}
        pts |= {Fraction(j, 4 * a) + Fraction(3, 4 * a) for j in range(-4, 4 * a + 1)}
        br = np.array(sorted(float(p) for p in pts if 0 <= p <= 1))
        return _simpson_exact(lambda t: f1(a * t) * f2(b * t), br)
    d = k1.size
    h = (np.arange(grid) + 0.5) / grid
    if d == 1:
        return float(np.mean(f1(k1[0] * h) * f2(k2[0] * h)))
    X, Y = np.meshgrid(h, h, indexing="ij")
    if d != 2:
        raise NotImplementedError("grid quadrature only for d <= 2")
    return float(np.mean(f1(k1[0] * X + k1[1] * Y) * f2(k2[0] * X + k2[1] * Y)))
