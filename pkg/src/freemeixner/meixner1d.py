"""Single-cell free Meixner layer: recursion, moments, Psi series, cumulants.

All arithmetic is exact. The Jacobi operator is used in its monic
(non-symmetric) form so no square roots ever appear.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .report import Report
from .series import FormalSeries, Polynomial, series_compose_inverse
from .space import as_fraction


@dataclass(frozen=True)
class JacobiParams:
    lam: Fraction
    eta: Fraction
    k: Fraction

    def __post_init__(self):
        for name in ("lam", "eta", "k"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.k <= 0:
            raise ValueError("k must be positive")
        if self.eta < 0:
            raise ValueError("eta must be non-negative")

    def diagonal(self, level: int) -> Fraction:
        return Fraction(0) if level == 0 else self.lam

    def lower(self, level: int) -> Fraction:
        """Weight c_level of P^(level-1) in x P^(level-1); c_1 = k, c_m = k + eta."""
        if level < 1:
            raise ValueError("level must be >= 1")
        return self.k if level == 1 else self.k + self.eta


@lru_cache(maxsize=None)
def _poly_table(p: JacobiParams, n: int) -> tuple:
    x = Polynomial.x()
    table = [Polynomial.const(1), x]
    for m in range(1, n):
        # x P_m = P_{m+1} + a_m P_m + c_m P_{m-1}
        table.append((x - p.diagonal(m)) * table[m] - p.lower(m) * table[m - 1])
    return tuple(table[: n + 1])


def meixner_poly(n: int, p: JacobiParams) -> Polynomial:
    """Monic orthogonal polynomial P^(n) of the free Meixner family with parameters p."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return _poly_table(p, max(n, 1))[n]


def vacuum_moment(n: int, p: JacobiParams) -> Fraction:
    """n-th moment of the orthogonality measure, as a weighted Motzkin-path count.

    Up-steps weigh 1, a level step at height h weighs a_h and a down-step
    from h to h-1 weighs c_h.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    heights = {0: Fraction(1)}
    for step in range(n):
        nxt: dict[int, Fraction] = {}
        remaining = n - step - 1
        for h, w in heights.items():
            moves = [(h + 1, w), (h, w * p.diagonal(h))]
            if h > 0:
                moves.append((h - 1, w * p.lower(h)))
            for h2, w2 in moves:
                # paths must be able to come back down to 0
                if w2 and h2 <= remaining:
                    nxt[h2] = nxt.get(h2, Fraction(0)) + w2
        heights = nxt
    return heights.get(0, Fraction(0))


def psi_series(lam, eta, order: int) -> FormalSeries:
    """z / (1 + lam z + eta z^2) truncated at the given order."""
    if order < 1:
        raise ValueError("order must be at least 1")
    denom = FormalSeries.from_coeffs([1, as_fraction(lam), as_fraction(eta)], order)
    return FormalSeries.identity(order) / denom


def c_compose_psi_series(lam, eta, order: int) -> FormalSeries:
    """z^2 / (1 + lam z + eta z^2), the free cumulant transform evaluated at Psi."""
    if order < 1:
        raise ValueError("order must be at least 1")
    denom = FormalSeries.from_coeffs([1, as_fraction(lam), as_fraction(eta)], order)
    return FormalSeries.from_coeffs([0, 0, 1], order) / denom


def free_cumulants(p: JacobiParams, order: int) -> list[Fraction]:
    """[kappa_1, ..., kappa_order] read off k * C(u) with C = (C o Psi) o Psi^{-1}."""
    if order < 2:
        raise ValueError("order must be at least 2")
    psi_inv = series_compose_inverse(psi_series(p.lam, p.eta, order))
    c = c_compose_psi_series(p.lam, p.eta, order).compose(psi_inv)
    return [p.k * c[n] for n in range(1, order + 1)]


def genfun_1d_coefficient(n: int, p: JacobiParams) -> Polynomial:
    """z^n coefficient of (1 - x Psi(z) + k (C o Psi)(z))^{-1}, a polynomial in x."""
    if n < 0:
        raise ValueError("n must be non-negative")
    order = max(n, 1)
    psi = psi_series(p.lam, p.eta, order)
    cpsi = c_compose_psi_series(p.lam, p.eta, order)
    x = Polynomial.x()
    # A(z) = x Psi(z) - k CPsi(z); the resolvent is G = 1 + A G
    a = [x * psi[m] - p.k * cpsi[m] for m in range(order + 1)]
    g = [Polynomial.const(1)]
    for m in range(1, n + 1):
        g.append(sum((a[i] * g[m - i] for i in range(1, m + 1)), Polynomial()))
    return g[n]


def annihilation_1d(poly: Polynomial, p: JacobiParams) -> Polynomial:
    """Apply Psi_{lam, eta+k}^{-1}(D) with D the free difference quotient."""
    order = max(poly.degree, 1)
    inv = series_compose_inverse(psi_series(p.lam, p.eta + p.k, order))
    out = Polynomial()
    term = poly
    for m in range(1, order + 1):
        term = term.free_difference()
        if inv[m]:
            out = out + inv[m] * term
    return out


def verify_1d_annihilation(p: JacobiParams, degree: int) -> Report:
    """Check that Psi_{lam, eta+k}^{-1}(D) lowers P^(n) to P^(n-1) for n <= degree."""
    if degree < 0:
        raise ValueError("degree must be non-negative")
    first = None
    for n in range(degree + 1):
        got = annihilation_1d(meixner_poly(n, p), p)
        want = meixner_poly(n - 1, p) if n >= 1 else Polynomial()
        if got != want:
            first = {"degree": n, "got": list(got.coeffs), "expected": list(want.coeffs)}
            break
    return Report(
        "1d-annihilation",
        first is None,
        {"lam": p.lam, "eta": p.eta, "k": p.k, "degree": degree},
        first,
    )
