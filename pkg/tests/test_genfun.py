import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freemeixner import ratmat as rm
from freemeixner.battery import random_field
from freemeixner.constants import domain_radius
from freemeixner.fock import build_rep
from freemeixner.genfun import (
    CoefficientAlgebraElement,
    OperatorStepField,
    closed_form_terms,
    genfun_closed_coefficients,
    genfun_series_coefficients,
    integral_simple,
    ortho_pairing_Z,
    partial_sum_apply,
    probe_vectors,
    smeared_pairing,
    verify_theorem3_formal,
    verify_theorem3_numeric,
)
from freemeixner.meixner1d import JacobiParams, meixner_poly
from freemeixner.partitions import PreconditionError
from freemeixner.space import DiscreteSpace, StepFunction, StructureError

SPACE = DiscreteSpace.from_lists(["1/2", 2, "3/4"], [1, -1, "1/2"], ["1/2", 0, 1])


def field(seed, dim, space=SPACE, cap=Fraction(1)):
    return random_field(random.Random(seed), space, dim, cap)


def test_field_validation():
    with pytest.raises(StructureError):
        OperatorStepField(SPACE, 2, {0: [[1]]})
    with pytest.raises(StructureError):
        OperatorStepField(SPACE, 1, {9: [[1]]})
    Z = OperatorStepField(SPACE, 1, {0: [[0]], 1: [[2]]})
    assert Z.support == (1,)


def test_field_algebra():
    Z = OperatorStepField(SPACE, 2, {0: [[1, 2], [3, 4]], 1: [[0, 1], [1, 0]]})
    W = OperatorStepField(SPACE, 2, {0: [[1, 0], [0, 1]]})
    assert (Z * W).support == (0,)
    assert rm.equal((Z * StepFunction(SPACE, SPACE.lam))(1), rm.ratmat([[0, -1], [-1, 0]]))
    expected = rm.ratmat([[1, 2], [3, 4]]) * Fraction(1, 2) + rm.ratmat([[0, 2], [2, 0]])
    assert rm.equal(Z.integral(), expected)
    assert Z.norm_upper() >= Fraction(Z.norm())


def test_coefficient_algebra_product_order():
    A = CoefficientAlgebraElement(2, {(0,): rm.ratmat([[0, 1], [0, 0]])})
    B = CoefficientAlgebraElement(2, {(1,): rm.ratmat([[0, 0], [1, 0]])})
    AB = A * B
    assert list(AB.terms) == [(0, 1)]
    assert rm.equal(AB.terms[(0, 1)], rm.ratmat([[1, 0], [0, 0]]))
    assert (A - A).terms == {}
    assert A * B != B * A


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_literal_recursion_matches_leading_cell_split(dim):
    Z = field(dim, dim)
    G = genfun_series_coefficients(Z, 4)
    for n in range(1, 5):
        assert ortho_pairing_Z(n, [Z] * n) == G[n]


def test_scalar_single_cell_reduces_to_meixner_polynomials():
    s = DiscreteSpace.from_lists(["3/2"], ["1/2"], ["2/3"])
    z = Fraction(1, 3)
    Z = OperatorStepField.scalar(s, {0: z})
    G = genfun_series_coefficients(Z, 6)
    p = JacobiParams(s.lam[0], s.eta[0], s.sigma[0])
    for n, g in enumerate(G):
        poly = meixner_poly(n, p)
        got = {len(w): m[0, 0] for w, m in g.terms.items()}
        assert got == {k: c * z**n for k, c in enumerate(poly.coeffs) if c}


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 2), st.integers(1, 3))
def test_series_equals_closed_form(seed, dim, cells):
    rng = random.Random(seed)
    space = DiscreteSpace.from_lists(
        [Fraction(rng.randint(1, 8), 4) for _ in range(cells)],
        [Fraction(rng.randint(-4, 4), 2) for _ in range(cells)],
        [Fraction(rng.randint(0, 4), 2) for _ in range(cells)],
    )
    Z = random_field(rng, space, dim, Fraction(2))
    assert genfun_series_coefficients(Z, 5) == genfun_closed_coefficients(Z, 5)


def test_closed_form_first_terms():
    Z = field(3, 2)
    A = closed_form_terms(Z, 2)
    assert A[1] == smeared_pairing(Z)
    G = genfun_closed_coefficients(Z, 2)
    assert G[1] == smeared_pairing(Z)


def test_formal_report_and_degree_guard():
    Z = field(4, 2)
    r = verify_theorem3_formal(SPACE, Z, 5)
    assert r.passed and r.details["free_algebra_equal"]
    assert r.details["representation_gap"] is None
    with pytest.raises(PreconditionError):
        verify_theorem3_formal(SPACE, Z, 9)


def test_evaluation_matches_partial_sum_on_vectors():
    rep = build_rep(SPACE, 6)
    Z = field(5, 2, cap=Fraction(1, 4))
    G = genfun_series_coefficients(Z, 4)
    V = probe_vectors(2, rep, n_random=1)
    dense = sum(g.evaluate(rep) for g in G) @ V
    assert np.allclose(partial_sum_apply(Z, rep, 4, V), dense, atol=1e-12)


def test_integral_simple_within_constant():
    rep = build_rep(SPACE, 6)
    Z = field(6, 2)
    out = integral_simple(Z, rep)
    assert out.within_bound
    assert out.matrix.shape == (2 * rep.dim, 2 * rep.dim)


def test_numeric_check_and_radius_guard():
    rep = build_rep(SPACE, 10)
    cap = domain_radius(SPACE) / 2
    Z = field(7, 2, cap=cap)
    r = verify_theorem3_numeric(SPACE, Z, rep=rep, degree=8)
    assert r.passed
    assert r.details["gap"] <= r.details["bound"]
    assert r.details["cross_gap"] <= 1e-10
    with pytest.raises(PreconditionError):
        verify_theorem3_numeric(SPACE, Z * 4, rep=rep, degree=8)
    with pytest.raises(PreconditionError):
        verify_theorem3_numeric(SPACE, Z, rep=build_rep(SPACE, 5), degree=8)


def test_zero_field():
    Z = OperatorStepField(SPACE, 2, {})
    assert verify_theorem3_numeric(SPACE, Z, depth=4, degree=2).passed
    G = genfun_series_coefficients(Z, 3)
    assert G[0] == CoefficientAlgebraElement.unit(2) and all(not g.terms for g in G[1:])


def test_formal_mismatch_falls_back_to_the_model(monkeypatch):
    import freemeixner.genfun as gf

    real = gf.genfun_closed_coefficients

    def perturbed(Z, degree):
        out = real(Z, degree)
        out[2] = out[2] + CoefficientAlgebraElement(Z.dim, {(0, 1): rm.identity(Z.dim)})
        return out

    monkeypatch.setattr(gf, "genfun_closed_coefficients", perturbed)
    r = verify_theorem3_formal(SPACE, field(8, 1), 3)
    assert not r.passed
    assert not r.details["free_algebra_equal"]
    assert r.details["representation_gap"] > 0.5
    assert r.first_failure["degree"] == 2 and r.first_failure["word"] == [0, 1]
