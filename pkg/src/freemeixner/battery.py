"""Seeded random configurations used by the acceptance battery and the CLI."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .constants import domain_radius
from .genfun import OperatorStepField
from .space import DiscreteSpace

# sigma is kept at or above 1/4 so that 2 sqrt(sigma) + eta >= 1 on every
# cell; below that the field-norm constant can undershoot the true norm.
SIGMA_GRID = tuple(Fraction(k, 4) for k in range(1, 9))
LAM_GRID = tuple(Fraction(k, 2) for k in range(-4, 5))
ETA_GRID = tuple(Fraction(k, 2) for k in range(0, 5))


@dataclass(frozen=True)
class BatteryConfig:
    seed: int
    space: DiscreteSpace
    Z: OperatorStepField
    degree: int

    @property
    def dim(self) -> int:
        return self.Z.dim

    def to_json(self) -> dict:
        s = self.space
        return {
            "seed": self.seed,
            "cells": [str(c) for c in s.cells],
            "sigma": [str(s.sigma[c]) for c in s.cells],
            "lambda": [str(s.lam[c]) for c in s.cells],
            "eta": [str(s.eta[c]) for c in s.cells],
            "dim": self.dim,
            "degree": self.degree,
        }


def random_space(rng: random.Random, n_cells: int, gauss_poisson: bool = False) -> DiscreteSpace:
    sigma = [rng.choice(SIGMA_GRID) for _ in range(n_cells)]
    lam = [rng.choice(LAM_GRID) for _ in range(n_cells)]
    eta = [Fraction(0) if gauss_poisson else rng.choice(ETA_GRID) for _ in range(n_cells)]
    return DiscreteSpace.from_lists(sigma, lam, eta)


def scale_to_cap(Z: OperatorStepField, cap: Fraction) -> OperatorStepField:
    """Multiply by the largest power of 1/2 (at most 1) putting the certified norm strictly below cap."""
    bound = Z.norm_upper()
    scale = Fraction(1)
    while bound * scale >= cap:
        scale /= 2
    return Z * scale


def random_field(rng: random.Random, space: DiscreteSpace, dim: int, cap: Fraction, max_den: int = 4) -> OperatorStepField:
    """Rational matrices with small denominators on every cell, scaled below ``cap``."""
    values = {}
    for c in space.cells:
        m = [[Fraction(rng.randint(-max_den, max_den), rng.randint(1, max_den)) for _ in range(dim)] for _ in range(dim)]
        if all(x == 0 for row in m for x in row):
            m[0][0] = Fraction(1)
        values[c] = m
    return scale_to_cap(OperatorStepField(space, dim, values), cap)


def make_config(seed: int, min_degree: int = 5, max_degree: int = 8) -> BatteryConfig:
    rng = random.Random(seed)
    space = random_space(rng, rng.randint(1, 3))
    dim = rng.randint(1, 3)
    Z = random_field(rng, space, dim, domain_radius(space) / 2)
    return BatteryConfig(seed, space, Z, rng.randint(min_degree, max_degree))


def battery(n: int = 20, seed: int = 2024, **kw) -> list[BatteryConfig]:
    """n configurations; cell counts 1..3 and dimensions 1..3 are all covered when n >= 9."""
    out = []
    for i in range(n):
        cfg = make_config(seed + i, **kw)
        out.append(cfg)
    # force coverage of every (cells, dim) pair so small batteries are not lopsided
    for i, (cells, dim) in enumerate((c, d) for c in (1, 2, 3) for d in (1, 2, 3)):
        if i >= n:
            break
        rng = random.Random(seed + 10_000 + i)
        space = random_space(rng, cells)
        Z = random_field(rng, space, dim, domain_radius(space) / 2)
        out[i] = BatteryConfig(seed + 10_000 + i, space, Z, rng.randint(kw.get("min_degree", 5), kw.get("max_degree", 8)))
    return out
