"""Non-crossing partitions, singleton-free kernels and the free moment-cumulant sum."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from typing import Sequence

from .space import DiscreteSpace

MAX_N = 14


class CapacityError(RuntimeError):
    """Requested size exceeds what the enumerator is willing to materialise."""


class PreconditionError(ValueError):
    pass


def is_noncrossing(blocks: Sequence[Sequence[int]]) -> bool:
    owner = {}
    for b, block in enumerate(blocks):
        for i in block:
            owner[i] = b
    points = sorted(owner)
    # a < b < c < d with a, c in one block and b, d in another
    for a, b, c, d in combinations(points, 4):
        if owner[a] == owner[c] and owner[b] == owner[d] and owner[a] != owner[b]:
            return False
    return True


@dataclass(frozen=True, order=True)
class SetPartition:
    """Blocks of {1, ..., n}, each sorted, ordered by their smallest element."""

    blocks: tuple

    def __post_init__(self):
        blocks = tuple(sorted((tuple(sorted(b)) for b in self.blocks), key=lambda b: b[0]))
        object.__setattr__(self, "blocks", blocks)
        flat = sorted(i for b in blocks for i in b)
        if flat != list(range(1, len(flat) + 1)):
            raise ValueError(f"blocks {blocks} do not partition 1..{len(flat)}")

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def noncrossing(self) -> bool:
        return is_noncrossing(self.blocks)

    @property
    def min_block_size(self) -> int:
        return min(len(b) for b in self.blocks)

    def __repr__(self):
        return "{" + "}{".join("".join(str(i) if i < 10 else f"({i})" for i in b) for b in self.blocks) + "}"


@dataclass(frozen=True)
class BlockCellAssignment:
    """One cell per block of a partition: the discrete form of the delta kernels."""

    partition: SetPartition
    cells: tuple

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))
        if len(self.cells) != len(self.partition.blocks):
            raise ValueError("need exactly one cell per block")

    def cell_of_position(self) -> tuple:
        """Cell attached to each position 1..n (as a 0-based tuple)."""
        out = [None] * self.partition.n
        for block, cell in zip(self.partition.blocks, self.cells):
            for i in block:
                out[i - 1] = cell
        return tuple(out)


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError("n must be positive")
    if n > MAX_N:
        raise CapacityError(f"n={n} exceeds the enumeration bound {MAX_N}")


@lru_cache(maxsize=None)
def _nc_interval(lo: int, hi: int) -> tuple:
    """All NC partitions of the interval lo..hi as tuples of blocks (unsorted)."""
    if lo > hi:
        return ((),)
    out = []
    rest = range(lo + 1, hi + 1)
    for k in range(len(rest) + 1):
        for others in combinations(rest, k):
            first = (lo,) + others
            # gaps between consecutive members of the first block, plus the tail
            bounds = list(zip(first, first[1:] + (hi + 1,)))
            pieces = [_nc_interval(a + 1, b - 1) for a, b in bounds]
            for combo in product(*pieces):
                out.append((first,) + tuple(blk for part in combo for blk in part))
    return tuple(out)


def enumerate_nc(n: int) -> list[SetPartition]:
    """Every non-crossing partition of {1, ..., n}, sorted lexicographically by blocks."""
    _check_n(n)
    return sorted(SetPartition(p) for p in _nc_interval(1, n))


def enumerate_nc_min2(n: int) -> list[SetPartition]:
    """Non-crossing partitions of {1, ..., n} with no singleton blocks."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return [p for p in enumerate_nc(n) if p.min_block_size >= 2]


def block_assignments(space: DiscreteSpace, partition: SetPartition):
    for cells in product(space.cells, repeat=len(partition.blocks)):
        yield BlockCellAssignment(partition, cells)


def kernel_weight(space: DiscreteSpace, a: BlockCellAssignment) -> Fraction:
    """Integral of the singleton-free kernel with each block pinned to its cell.

    An l-point delta against sigma^l over one cell collapses to sigma_j, and
    the block carries lambda_j^(l-2).
    """
    w = Fraction(1)
    for block, cell in zip(a.partition.blocks, a.cells):
        if len(block) < 2:
            raise PreconditionError("singleton block in a kernel partition")
        space.check_cells([cell])
        w *= space.lam[cell] ** (len(block) - 2) * space.sigma[cell]
    return w


def moment_from_cumulants(cumulants: Sequence, n: int) -> Fraction:
    """m_n = sum over NC(n) of the product of kappa_|B|; kappa_k = cumulants[k-1]."""
    if n == 0:
        return Fraction(1)
    kappa = [Fraction(c) for c in cumulants]

    def k(size):
        return kappa[size - 1] if size <= len(kappa) else Fraction(0)

    total = Fraction(0)
    for p in enumerate_nc(n):
        term = Fraction(1)
        for b in p.blocks:
            term *= k(len(b))
            if not term:
                break
        total += term
    return total
