"""Exact truncated power series and univariate polynomials over the rationals."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class SeriesOrderError(ValueError):
    """Two series with different truncation orders were combined."""


class SingularSeriesError(ZeroDivisionError):
    pass


def _fracs(values: Iterable) -> tuple:
    return tuple(Fraction(v) for v in values)


@dataclass(frozen=True)
class FormalSeries:
    """c_0 + c_1 z + ... + c_N z^N + O(z^(N+1)), with the order N carried explicitly."""

    coeffs: tuple

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("a series needs at least the constant coefficient")
        object.__setattr__(self, "coeffs", _fracs(self.coeffs))

    @classmethod
    def from_coeffs(cls, coeffs: Sequence, order: int) -> "FormalSeries":
        c = list(coeffs)[: order + 1]
        c += [0] * (order + 1 - len(c))
        return cls(tuple(c))

    @classmethod
    def identity(cls, order: int) -> "FormalSeries":
        return cls.from_coeffs([0, 1], order)

    @classmethod
    def constant(cls, value, order: int) -> "FormalSeries":
        return cls.from_coeffs([value], order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> Fraction:
        if n > self.order:
            raise IndexError(f"coefficient {n} is beyond the truncation order {self.order}")
        return self.coeffs[n] if n >= 0 else Fraction(0)

    def _match(self, other: "FormalSeries") -> None:
        if not isinstance(other, FormalSeries):
            raise TypeError("expected a FormalSeries")
        if other.order != self.order:
            raise SeriesOrderError(f"order mismatch: {self.order} vs {other.order}")

    def truncate(self, order: int) -> "FormalSeries":
        if order > self.order:
            raise SeriesOrderError("cannot raise the truncation order of a series")
        return FormalSeries(self.coeffs[: order + 1])

    def __add__(self, other):
        self._match(other)
        return FormalSeries(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return FormalSeries(tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a) -> "FormalSeries":
        a = Fraction(a)
        return FormalSeries(tuple(a * c for c in self.coeffs))

    def __mul__(self, other):
        if not isinstance(other, FormalSeries):
            return self.scale(other)
        self._match(other)
        n = self.order
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * (n + 1)
        for i, ai in enumerate(a):
            if ai:
                for j in range(n + 1 - i):
                    out[i + j] += ai * b[j]
        return FormalSeries(tuple(out))

    __rmul__ = scale

    def reciprocal(self) -> "FormalSeries":
        """Multiplicative inverse; needs a non-zero constant term."""
        a = self.coeffs
        if a[0] == 0:
            raise SingularSeriesError("constant term is zero")
        out = [1 / a[0]]
        for n in range(1, self.order + 1):
            s = sum((a[k] * out[n - k] for k in range(1, n + 1)), Fraction(0))
            out.append(-s / a[0])
        return FormalSeries(tuple(out))

    def __truediv__(self, other):
        if isinstance(other, FormalSeries):
            return self * other.reciprocal()
        return self.scale(1 / Fraction(other))

    def compose(self, inner: "FormalSeries") -> "FormalSeries":
        """self(inner(z)); inner must have zero constant term."""
        self._match(inner)
        if inner.coeffs[0] != 0:
            raise ValueError("inner series must vanish at zero")
        # Horner: c_0 + inner*(c_1 + inner*(...))
        acc = FormalSeries.constant(self.coeffs[-1], self.order)
        for c in reversed(self.coeffs[:-1]):
            acc = acc * inner + FormalSeries.constant(c, self.order)
        return acc

    def __eq__(self, other):
        if not isinstance(other, FormalSeries):
            return NotImplemented
        self._match(other)
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        terms = [f"{c}*z^{k}" for k, c in enumerate(self.coeffs) if c]
        return "FormalSeries(" + (" + ".join(terms) or "0") + f" + O(z^{self.order + 1}))"


def series_compose_inverse(s: FormalSeries, order: int | None = None) -> FormalSeries:
    """Compositional inverse of s (s_0 = 0, s_1 != 0) up to the given order.

    Solved coefficient by coefficient: with t = s^{-1}, the coefficient of z^n
    in s(t(z)) is s_1 t_n plus terms involving only t_1..t_{n-1}.
    """
    order = s.order if order is None else order
    if order > s.order:
        raise SeriesOrderError("inverse requested beyond the order of the input")
    s = s.truncate(order)
    if s.coeffs[0] != 0:
        raise ValueError("series must vanish at zero to be inverted")
    if order >= 1 and s.coeffs[1] == 0:
        raise SingularSeriesError("linear coefficient is zero; no compositional inverse")
    t = [Fraction(0)] * (order + 1)
    if order == 0:
        return FormalSeries(tuple(t))
    t[1] = 1 / s.coeffs[1]
    for n in range(2, order + 1):
        trial = FormalSeries(tuple(t))
        residue = s.compose(trial).coeffs[n]
        t[n] = -residue / s.coeffs[1]
    return FormalSeries(tuple(t))


@dataclass(frozen=True)
class Polynomial:
    """Polynomial in one variable, coefficients listed from the constant term up."""

    coeffs: tuple = ()

    def __post_init__(self):
        c = list(_fracs(self.coeffs))
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def x(cls) -> "Polynomial":
        return cls((0, 1))

    @classmethod
    def const(cls, a) -> "Polynomial":
        return cls((a,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(tuple(self[k] + other[k] for k in range(n)))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if not self.coeffs or not other.coeffs:
            return Polynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(tuple(out))

    __rmul__ = __mul__

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def free_difference(self) -> "Polynomial":
        """(p(x) - p(0)) / x, i.e. x^n -> x^(n-1) and 1 -> 0."""
        return Polynomial(self.coeffs[1:])

    def __repr__(self):
        if not self.coeffs:
            return "Polynomial(0)"
        terms = [f"{c}*x^{k}" for k, c in enumerate(self.coeffs) if c]
        return "Polynomial(" + " + ".join(terms) + ")"


def _as_poly(p) -> Polynomial:
    return p if isinstance(p, Polynomial) else Polynomial.const(p)
