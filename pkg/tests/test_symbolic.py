import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freemeixner.partitions import PreconditionError
from freemeixner.space import DiscreteSpace
from freemeixner.symbolic import (
    MONOMIAL,
    ORTHOGONAL,
    PolyElement,
    annihilation,
    annihilation_via_basis,
    annihilation_via_global,
    free_derivative,
    global_operator,
    left_multiply_field,
    mono_to_ortho,
    ortho_to_mono,
    verify_globality,
)

SPACE = DiscreteSpace.from_lists(["1/2", 2, "3/4"], [1, "-1/2", 0], ["1/3", 0, 1])
GP = DiscreteSpace.from_lists([1, "2/3"], ["3/2", -1], [0, 0])

words = st.lists(st.sampled_from(SPACE.cells), max_size=5).map(tuple)


@given(words)
def test_basis_change_round_trip(w):
    p = PolyElement.word(SPACE, MONOMIAL, w)
    assert ortho_to_mono(mono_to_ortho(p)) == p
    q = PolyElement.word(SPACE, ORTHOGONAL, w)
    assert mono_to_ortho(ortho_to_mono(q)) == q


@given(words)
def test_basis_change_is_unitriangular(w):
    q = ortho_to_mono(PolyElement.word(SPACE, ORTHOGONAL, w))
    assert q.terms[w] == 1
    assert q.degree == len(w)
    assert all(len(u) < len(w) for u in q.terms if u != w)


def test_single_cell_reduces_to_one_dimensional_recursion():
    s = DiscreteSpace.from_lists([2], ["1/2"], ["1/3"])
    p3 = ortho_to_mono(PolyElement.word(s, ORTHOGONAL, (0, 0, 0)))
    # P3 = (x - lam) P2 - (k + eta) P1 with P2 = (x - lam) x - k
    lam, k, eta = Fraction(1, 2), Fraction(2), Fraction(1, 3)
    expected = {(0, 0, 0): 1, (0, 0): -2 * lam, (0,): lam * lam - k - (k + eta), (): lam * k}
    assert p3 == PolyElement(s, MONOMIAL, expected)


def test_left_multiplication_three_term_rule():
    q = PolyElement.word(SPACE, ORTHOGONAL, (0, 0))
    out = left_multiply_field(0, q)
    assert out.terms == {
        (0, 0, 0): 1,
        (0, 0): SPACE.lam[0],
        (0,): SPACE.sigma[0] + SPACE.eta[0],
    }
    assert left_multiply_field(1, q).terms == {(1, 0, 0): 1}


def test_derivatives_drop_head_letters():
    p = PolyElement(SPACE, MONOMIAL, {(0, 1): 2, (1,): 3, (): 5})
    assert free_derivative(0, p).terms == {(1,): 2}
    assert free_derivative(1, p).terms == {(): 3}
    with pytest.raises(ValueError):
        annihilation(0, p)
    with pytest.raises(ValueError):
        free_derivative(0, mono_to_ortho(p))


def test_products_only_in_monomial_basis():
    a = PolyElement.word(SPACE, ORTHOGONAL, (0,))
    with pytest.raises(ValueError):
        a * a
    m = PolyElement.word(SPACE, MONOMIAL, (0,))
    assert (m * m).terms == {(0, 0): 1}
    with pytest.raises(ValueError):
        a + m


def test_global_operator_needs_gauss_poisson():
    with pytest.raises(PreconditionError):
        global_operator(PolyElement.word(SPACE, MONOMIAL, (0, 0)))
    with pytest.raises(PreconditionError):
        verify_globality(SPACE)


def test_global_operator_on_short_words():
    s = GP
    assert global_operator(PolyElement.word(s, MONOMIAL, (1,))) == PolyElement.word(s, MONOMIAL, (1,))
    assert global_operator(PolyElement.word(s, MONOMIAL, (0, 0))).terms == {(0, 0): 1, (): s.sigma[0]}
    assert global_operator(PolyElement.word(s, MONOMIAL, (0, 1))).terms == {(0, 1): 1}
    three = global_operator(PolyElement.word(s, MONOMIAL, (1, 1, 1))).terms
    assert three == {(1, 1, 1): 1, (1,): s.sigma[1], (): s.lam[1] * s.sigma[1]}


def test_globality_three_cells_degree_four():
    s = DiscreteSpace.from_lists([1, "1/2", 2], [0, 2, "-1/2"], [0, 0, 0])
    r = verify_globality(s, degree=4)
    assert r.passed, r.first_failure


@settings(max_examples=30, deadline=None)
@given(st.lists(st.sampled_from(GP.cells), min_size=1, max_size=6).map(tuple), st.sampled_from(GP.cells))
def test_annihilation_routes_agree(w, j):
    p = PolyElement.word(GP, MONOMIAL, w)
    assert annihilation_via_basis(j, p) == annihilation_via_global(j, p)


def test_zero_lambda_gives_plain_composition():
    s = DiscreteSpace.from_lists([1, 3], [0, 0], [0, 0])
    for w in itertools.product(s.cells, repeat=4):
        p = PolyElement.word(s, MONOMIAL, w)
        assert annihilation_via_basis(0, p) == free_derivative(0, global_operator(p))
