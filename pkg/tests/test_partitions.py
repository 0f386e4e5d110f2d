from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freemeixner.partitions import (
    CapacityError,
    PreconditionError,
    SetPartition,
    BlockCellAssignment,
    block_assignments,
    enumerate_nc,
    enumerate_nc_min2,
    is_noncrossing,
    kernel_weight,
    moment_from_cumulants,
)
from freemeixner.space import DiscreteSpace


def all_set_partitions(items):
    """Brute-force generator of every set partition of ``items``."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for p in all_set_partitions(rest):
        yield [[first]] + p
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1 :]


def catalan(n):
    c = [1]
    for m in range(1, n + 1):
        c.append(sum(c[i] * c[m - 1 - i] for i in range(m)))
    return c[n]


def motzkin_like_min2(n):
    # singleton-free NC counts (Riordan numbers)
    r = [1, 0]
    for m in range(2, n + 1):
        r.append((m - 1) * (2 * r[m - 1] + 3 * r[m - 2]) // (m + 1))
    return r[n]


@pytest.mark.parametrize("n", range(1, 8))
def test_nc_matches_brute_force(n):
    brute = {SetPartition(tuple(tuple(b) for b in p)) for p in all_set_partitions(list(range(1, n + 1)))}
    nc = {p for p in brute if p.noncrossing}
    assert set(enumerate_nc(n)) == nc
    assert len(enumerate_nc(n)) == catalan(n)


@pytest.mark.parametrize("n", range(2, 11))
def test_singleton_free_counts(n):
    got = enumerate_nc_min2(n)
    assert len(got) == motzkin_like_min2(n)
    assert all(p.min_block_size >= 2 and p.noncrossing for p in got)


def test_enumeration_is_sorted_and_unique():
    ps = enumerate_nc(6)
    assert ps == sorted(ps)
    assert len(set(ps)) == len(ps)


def test_nc_min2_of_four():
    assert [repr(p) for p in enumerate_nc_min2(4)] == ["{12}{34}", "{1234}", "{14}{23}"]


def test_capacity_and_bad_sizes():
    with pytest.raises(CapacityError):
        enumerate_nc(15)
    with pytest.raises(ValueError):
        enumerate_nc_min2(1)
    with pytest.raises(ValueError):
        SetPartition(((1, 3),))


def test_crossing_detection():
    assert not is_noncrossing([(1, 3), (2, 4)])
    assert is_noncrossing([(1, 4), (2, 3)])


def test_kernel_weight():
    s = DiscreteSpace.from_lists([2, 3], [5, 7], [0, 0])
    p = SetPartition(((1, 2, 3), (4, 5)))
    a = BlockCellAssignment(p, (1, 0))
    assert kernel_weight(s, a) == 7 * 3 * 2
    assert a.cell_of_position() == (1, 1, 1, 0, 0)
    assert len(list(block_assignments(s, p))) == 4
    with pytest.raises(PreconditionError):
        kernel_weight(s, BlockCellAssignment(SetPartition(((1,), (2,))), (0, 0)))


def test_semicircle_and_poisson_moments():
    # only kappa_2 = 1: Catalan numbers at even orders
    assert [moment_from_cumulants([0, 1], n) for n in range(9)] == [1, 0, 1, 0, 2, 0, 5, 0, 14]
    # all kappa = 1: counts of NC(n)
    assert [moment_from_cumulants([1] * 7, n) for n in range(8)] == [catalan(n) for n in range(8)]


@settings(max_examples=25, deadline=None)
@given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=6), min_size=6, max_size=6))
def test_moments_match_brute_force_sum(kappa):
    n = 6
    total = Fraction(0)
    for p in all_set_partitions(list(range(1, n + 1))):
        if is_noncrossing(p):
            term = Fraction(1)
            for b in p:
                term *= kappa[len(b) - 1]
            total += term
    assert moment_from_cumulants(kappa, n) == total
