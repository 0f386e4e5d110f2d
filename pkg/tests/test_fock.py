from fractions import Fraction

import numpy as np
import pytest

from freemeixner.fock import (
    basis_size,
    build_rep,
    moment_crosscheck,
    operator_norm,
    ortho_poly_operator,
    smeared_field,
    verify_chaos_orthogonality,
    verify_factorization,
    word_vectors,
)
from freemeixner.partitions import CapacityError, PreconditionError
from freemeixner.space import DiscreteSpace, StepFunction

SPACE = DiscreteSpace.from_lists(["1/2", 2, "3/4"], [1, "-1/2", 0], ["1/3", 0, 1])


@pytest.fixture(scope="module")
def rep():
    return build_rep(SPACE, 7)


def test_basis_size_formula(rep):
    assert rep.dim == basis_size(3, 7) == sum(3**m for m in range(8))


def test_single_cell_is_a_jacobi_matrix():
    s = DiscreteSpace.from_lists([4], [2], [5])
    X = build_rep(s, 4).X(0).toarray()
    expected = np.diag([0, 2, 2, 2, 2]) + np.diag([2, 3, 3, 3], 1) + np.diag([2, 3, 3, 3], -1)
    assert np.allclose(X, expected)


def test_fields_are_symmetric(rep):
    for c in SPACE.cells:
        X = rep.X(c)
        assert abs(X - X.T).max() < 1e-15


def test_capacity_and_depth_guards():
    with pytest.raises(CapacityError):
        build_rep(SPACE, 12, max_basis=1000)
    with pytest.raises(ValueError):
        build_rep(SPACE, 1)


def test_chaos_orthogonality(rep):
    r = verify_chaos_orthogonality(rep, 4)
    assert r.passed and r.details["max_violation"] < 1e-10
    with pytest.raises(PreconditionError):
        verify_chaos_orthogonality(rep, 6)


def test_word_vector_norms_follow_the_jacobi_weights(rep):
    vecs = word_vectors(rep, 3)
    s = SPACE
    assert np.dot(vecs[(0,)], vecs[(0,)]) == pytest.approx(float(s.sigma[0]))
    assert np.dot(vecs[(0, 0)], vecs[(0, 0)]) == pytest.approx(float(s.sigma[0] * (s.sigma[0] + s.eta[0])))
    assert np.dot(vecs[(0, 1)], vecs[(0, 1)]) == pytest.approx(float(s.sigma[0] * s.sigma[1]))


def test_moments(rep):
    for c in SPACE.cells:
        assert moment_crosscheck(rep, c, 8).passed


def test_factorization(rep):
    assert verify_factorization(rep, [(0, 0), (1,), (0, 2)]).passed
    assert verify_factorization(rep, [(2,), (0, 1, 0)]).passed
    with pytest.raises(PreconditionError):
        verify_factorization(rep, [(0, 1), (1,)])


def test_literal_recursion_matches_word_operators(rep):
    chi = [SPACE.indicator(c) for c in (0, 0, 1)]
    M = ortho_poly_operator(rep, chi)
    v = word_vectors(rep, 3)[(0, 0, 1)]
    assert np.allclose(M.matrix @ rep.vacuum(), v)
    assert not M.truncated


def test_smeared_field_is_linear(rep):
    f = StepFunction(SPACE, {0: 2, 2: Fraction(-1, 2)})
    expected = 2 * rep.X(0) - 0.5 * rep.X(2)
    assert abs(smeared_field(rep, f) - expected).max() < 1e-15


def test_operator_norm_dense_and_sparse_agree():
    rep = build_rep(DiscreteSpace.from_lists([1, 1], [0, 0], [0, 0]), 9)
    X = rep.X(0)
    assert rep.dim > 400
    assert operator_norm(X) == pytest.approx(np.linalg.norm(X.toarray(), 2), rel=1e-9)
