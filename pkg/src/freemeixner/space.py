"""Finite cell decomposition of the underlying space and scalar step functions."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

CellId = Hashable


class StructureError(ValueError):
    """Raised when objects refer to cells or spaces they do not belong to."""


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and decimal/ratio strings to an exact Fraction.

    Floats are rejected: silently converting ``0.1`` gives a 55-bit
    denominator, which is never what a config author meant.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


@dataclass(frozen=True)
class DiscreteSpace:
    """Ordered cells with per-cell measure ``sigma`` and parameters ``lambda``/``eta``."""

    cells: tuple
    sigma: Mapping[CellId, Fraction]
    lam: Mapping[CellId, Fraction]
    eta: Mapping[CellId, Fraction]

    def __post_init__(self):
        cells = tuple(self.cells)
        if not cells:
            raise StructureError("a space needs at least one cell")
        if len(set(cells)) != len(cells):
            raise StructureError("cell ids must be unique")
        object.__setattr__(self, "cells", cells)
        for name in ("sigma", "lam", "eta"):
            table = getattr(self, name)
            missing = [c for c in cells if c not in table]
            if missing:
                raise StructureError(f"{name} missing for cells {missing}")
            extra = [c for c in table if c not in cells]
            if extra:
                raise StructureError(f"{name} given for unknown cells {extra}")
            object.__setattr__(self, name, {c: as_fraction(table[c]) for c in cells})
        for c in cells:
            if self.sigma[c] <= 0:
                raise ValueError(f"sigma must be positive on cell {c!r}")
            if self.eta[c] < 0:
                raise ValueError(f"eta must be non-negative on cell {c!r}")

    @classmethod
    def from_lists(cls, sigma, lam, eta, cells=None) -> "DiscreteSpace":
        sigma, lam, eta = list(sigma), list(lam), list(eta)
        if cells is None:
            cells = tuple(range(len(sigma)))
        if not len(cells) == len(sigma) == len(lam) == len(eta):
            raise StructureError("parameter lists must have one entry per cell")
        return cls(
            tuple(cells),
            dict(zip(cells, sigma)),
            dict(zip(cells, lam)),
            dict(zip(cells, eta)),
        )

    def __hash__(self):
        return hash((self.cells, tuple(self.sigma.items()), tuple(self.lam.items()), tuple(self.eta.items())))

    def __eq__(self, other):
        if not isinstance(other, DiscreteSpace):
            return NotImplemented
        return (self.cells, self.sigma, self.lam, self.eta) == (other.cells, other.sigma, other.lam, other.eta)

    def __len__(self):
        return len(self.cells)

    def index(self, cell: CellId) -> int:
        try:
            return self.cells.index(cell)
        except ValueError:
            raise StructureError(f"unknown cell {cell!r}") from None

    def check_cells(self, cells: Iterable[CellId]) -> None:
        known = set(self.cells)
        for c in cells:
            if c not in known:
                raise StructureError(f"unknown cell {c!r}")

    def measure(self, cells: Iterable[CellId] | None = None) -> Fraction:
        """sigma(A) for the union A of the given cells (all cells by default)."""
        cells = self.cells if cells is None else tuple(cells)
        self.check_cells(cells)
        return sum((self.sigma[c] for c in set(cells)), Fraction(0))

    @property
    def gauss_poisson(self) -> bool:
        """True when eta vanishes on every cell."""
        return all(v == 0 for v in self.eta.values())

    def indicator(self, cell: CellId) -> "StepFunction":
        self.check_cells([cell])
        return StepFunction(self, {cell: Fraction(1)})


@dataclass(frozen=True)
class StepFunction:
    """Function constant on cells; cells not listed carry the value 0."""

    space: DiscreteSpace
    values: Mapping[CellId, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.space.check_cells(self.values)
        clean = {c: as_fraction(v) for c, v in self.values.items()}
        object.__setattr__(self, "values", {c: clean[c] for c in self.space.cells if clean.get(c, 0) != 0})

    def __call__(self, cell: CellId) -> Fraction:
        self.space.check_cells([cell])
        return self.values.get(cell, Fraction(0))

    @property
    def support(self) -> frozenset:
        return frozenset(self.values)

    def _same_space(self, other: "StepFunction") -> None:
        if other.space != self.space:
            raise StructureError("step functions live on different spaces")

    def __add__(self, other: "StepFunction") -> "StepFunction":
        self._same_space(other)
        out = dict(self.values)
        for c, v in other.values.items():
            out[c] = out.get(c, 0) + v
        return StepFunction(self.space, out)

    def __mul__(self, other):
        if isinstance(other, StepFunction):
            return pointwise_product(self, other)
        a = as_fraction(other)
        return StepFunction(self.space, {c: a * v for c, v in self.values.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)


def integrate(space: DiscreteSpace, f: StepFunction) -> Fraction:
    """Sum of f_j * sigma_j over cells."""
    if f.space != space:
        space.check_cells(f.values)
    return sum((v * space.sigma[c] for c, v in f.values.items()), Fraction(0))


def pointwise_product(f: StepFunction, g: StepFunction) -> StepFunction:
    f._same_space(g)
    return StepFunction(f.space, {c: v * g.values[c] for c, v in f.values.items() if c in g.values})


def sup_norm(f: StepFunction) -> Fraction:
    return max((abs(v) for v in f.values.values()), default=Fraction(0))
