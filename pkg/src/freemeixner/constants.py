"""Norm constants C3, C4 and the certified radius C5 = min(1/C4, C6).

Float versions are plain evaluations of the closed forms. The certified
radius is computed in exact arithmetic from rational upper bounds of the
irrational ingredients, so every rational it returns is a true lower bound.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable

from .space import CellId, DiscreteSpace

_BITS = 64
_BISECTION_STEPS = 48


def sqrt_bound(x: Fraction, upper: bool = True, bits: int = _BITS) -> Fraction:
    """Rational bound on sqrt(x), exact whenever sqrt(x) is rational."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("negative argument")
    p, q = x.numerator, x.denominator
    scale = 1 << bits
    n = p * q * scale * scale
    r = math.isqrt(n)
    if upper and r * r != n:
        r += 1
    return Fraction(r, q * scale)


def _cells(space: DiscreteSpace, A: Iterable[CellId] | None) -> tuple:
    cells = space.cells if A is None else tuple(dict.fromkeys(A))
    if not cells:
        raise ValueError("A must contain at least one cell")
    space.check_cells(cells)
    return cells


def _sups(space, cells):
    sigma = space.measure(cells)
    lam = max(abs(space.lam[c]) for c in cells)
    eta = max(space.eta[c] for c in cells)
    return sigma, lam, eta


def c3(space: DiscreteSpace, A=None) -> float:
    sigma, lam, eta = _sups(space, _cells(space, A))
    return 2 * math.sqrt(sigma) + 2 * float(eta) + float(lam)


def c4(space: DiscreteSpace, A=None) -> float:
    sigma, lam, eta = _sups(space, _cells(space, A))
    return 2 * math.sqrt(sigma) + float(sigma) + 2 * float(eta) + 3 * float(lam)


def c3_upper(space: DiscreteSpace, A=None) -> Fraction:
    sigma, lam, eta = _sups(space, _cells(space, A))
    return 2 * sqrt_bound(sigma) + 2 * eta + lam


def c4_upper(space: DiscreteSpace, A=None) -> Fraction:
    sigma, lam, eta = _sups(space, _cells(space, A))
    return 2 * sqrt_bound(sigma) + sigma + 2 * eta + 3 * lam


def root_moduli_upper(lam: Fraction, eta: Fraction) -> tuple[Fraction, Fraction]:
    """Upper bounds for the moduli of the roots a, b of x^2 - lam x + eta.

    These are the a, b with a + b = lam and ab = eta. The factorisation of
    1 + lam x + eta x^2 flips the sign of x, which leaves moduli unchanged.
    The larger modulus comes first.
    """
    lam, eta = abs(Fraction(lam)), Fraction(eta)
    disc = lam * lam - 4 * eta
    if disc < 0:
        r = sqrt_bound(eta)
        return r, r
    big = (lam + sqrt_bound(disc)) / 2
    low = lam + sqrt_bound(disc, upper=False)
    small = 2 * eta / low if low > 0 else Fraction(0)
    return big, small


def alpha_beta_upper(space: DiscreteSpace, A=None) -> tuple[Fraction, Fraction]:
    cells = _cells(space, A)
    pairs = [root_moduli_upper(space.lam[c], space.eta[c]) for c in cells]
    return max(p[0] for p in pairs), max(p[1] for p in pairs)


def c6_lower(space: DiscreteSpace, A=None, steps: int = _BISECTION_STEPS) -> Fraction:
    """Largest dyadic-bisection C with (sum a^k C^k)(sum b^l C^l) C (C3 + C sigma) < 1.

    With both geometric series convergent the condition is equivalent to
    C (C3 + C sigma) < (1 - a C)(1 - b C), whose left side increases and
    right side decreases in C; the bisection keeps the left endpoint, which
    always satisfies the strict inequality.
    """
    cells = _cells(space, A)
    sigma = space.measure(cells)
    k3 = c3_upper(space, cells)
    a, b = alpha_beta_upper(space, cells)

    def ok(c: Fraction) -> bool:
        if a * c >= 1 or b * c >= 1:
            return False
        return c * (k3 + c * sigma) < (1 - a * c) * (1 - b * c)

    hi = 1 / k3
    lo = Fraction(0)
    for _ in range(steps):
        mid = (lo + hi) / 2
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def domain_radius(space: DiscreteSpace, A=None) -> Fraction:
    """Certified rational lower bound for C5(A) = min(1/C4(A), C6(A))."""
    cells = _cells(space, A)
    return min(1 / c4_upper(space, cells), c6_lower(space, cells))


def norm_constants(space: DiscreteSpace, A=None) -> tuple[float, float, float]:
    """(C3, C4, C5) for the union A of the given cells."""
    cells = _cells(space, A)
    return c3(space, cells), c4(space, cells), float(domain_radius(space, cells))
