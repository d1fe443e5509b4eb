"""
Tests for root data, Weyl groups and exact weight arithmetic.
"""

import math
from fractions import Fraction

import numpy as np
import pytest
import sympy

from src.errors import DomainError
from src.lie_core import (
    Weight,
    WeylElement,
    build_root_datum,
    dominance_leq,
    dominant_representative,
    generate_subgroup,
    is_dominant,
    levi_dimension,
    longest_element,
    pairing,
    parse_weight,
    reflection,
    simple_reflections,
    weyl_elements,
    weyl_orbit,
)

F = Fraction


@pytest.fixture(scope="module")
def b2():
    return build_root_datum("B", 2)


def test_b2_cartan_and_inverse(b2):
    assert b2.cartan == ((2, -2), (-1, 2))
    assert b2.cartan_bar == ((F(1), F(1, 2)), (F(1), F(1)))


def test_b2_coweights_and_rho(b2):
    assert b2.fundamental_coweights == (Weight.of(1, 0), Weight.of(1, 1))
    assert b2.weyl_vector == Weight.of(F(3, 2), F(1, 2))


def test_c2_rho():
    c2 = build_root_datum("C", 2)
    assert c2.weyl_vector == Weight.of(2, 1)
    assert c2.simple_roots[-1] == Weight.of(0, 2)
    assert c2.simple_coroots[-1] == Weight.of(0, 1)


@pytest.mark.parametrize("family,rank", [("B", 2), ("C", 2), ("B", 3), ("C", 3), ("B", 4)])
def test_rho_is_sum_of_fundamental_weights(family, rank):
    rd = build_root_datum(family, rank)
    total = Weight.zero(rank)
    for omega in rd.fundamental_weights:
        total = total + omega
    assert total == rd.weyl_vector


@pytest.mark.parametrize("family,rank", [("B", 2), ("C", 3)])
def test_fundamental_weights_dual_to_coroots(family, rank):
    rd = build_root_datum(family, rank)
    for i, omega in enumerate(rd.fundamental_weights):
        for j, check in enumerate(rd.simple_coroots):
            assert pairing(omega, check) == (1 if i == j else 0)


@pytest.mark.parametrize("family,rank,dim", [("B", 2, 10), ("C", 2, 10), ("B", 3, 21), ("C", 3, 21)])
def test_dimension(family, rank, dim):
    assert build_root_datum(family, rank).dimension == dim


def test_root_counts():
    b3 = build_root_datum("B", 3)
    assert len(b3.positive_roots) == 9
    assert len(b3.roots) == 18


def test_bad_family_and_rank():
    with pytest.raises(DomainError):
        build_root_datum("D", 2)
    with pytest.raises(DomainError):
        build_root_datum("B", 0)


@pytest.mark.parametrize("family,rank,order", [("B", 2, 8), ("C", 2, 8), ("B", 3, 48)])
def test_weyl_group_order_and_closure(family, rank, order):
    rd = build_root_datum(family, rank)
    elements = weyl_elements(rd)
    assert len(elements) == order
    assert generate_subgroup(simple_reflections(rd), rank) == frozenset(elements)


def test_reflection_negates_its_root(b2):
    for alpha in b2.roots:
        s = reflection(alpha)
        assert s.act(alpha) == -alpha
        assert (s * s).is_identity()


def test_reflection_fixes_orthogonal_vectors(b2):
    s = reflection(Weight.of(1, -1))
    assert s.act(Weight.of(1, 1)) == Weight.of(1, 1)


def test_product_is_composition(b2):
    elements = weyl_elements(b2)
    v = Weight.of(2, 1)
    for a in elements[:4]:
        for b in elements:
            assert (a * b).act(v) == a.act(b.act(v))
            assert (b * b.inverse()).is_identity()


def test_longest_element_is_minus_identity(b2):
    w0 = longest_element(b2)
    assert w0.act(b2.weyl_vector) == -b2.weyl_vector


def test_regular_orbit_has_full_size(b2):
    assert len(weyl_orbit(Weight.of(2, 1), weyl_elements(b2))) == 8
    assert len(weyl_orbit(Weight.of(1, 0), weyl_elements(b2))) == 4


def test_dominance(b2):
    zero = Weight.zero(2)
    assert dominance_leq(zero, b2.weyl_vector, b2)
    assert dominance_leq(Weight.of(F(1, 2), 0), b2.weyl_vector, b2)
    assert not dominance_leq(Weight.of(2, 0), b2.weyl_vector, b2)
    assert is_dominant(Weight.of(1, 1), b2)
    assert not is_dominant(Weight.of(0, 1), b2)


def test_dominant_representative(b2):
    rep = dominant_representative(Weight.of(F(-1, 2), F(3, 2)), b2)
    assert rep == Weight.of(F(3, 2), F(1, 2))
    assert is_dominant(rep, b2)


def test_levi_dimensions(b2):
    assert levi_dimension(b2, []) == 2
    assert levi_dimension(b2, [0]) == 4
    assert levi_dimension(b2, [1]) == 4
    assert levi_dimension(b2, [0, 1]) == 10


def test_parse_weight():
    assert parse_weight("1/2,0") == Weight.of(F(1, 2), 0)
    assert parse_weight("(3/2, 1/2)") == Weight.of(F(3, 2), F(1, 2))
    assert str(Weight.of(F(1, 2), 0)) == "(1/2,0)"
    with pytest.raises(DomainError):
        parse_weight("a,b")
    with pytest.raises(DomainError):
        parse_weight("")


def test_mismatched_ranks():
    with pytest.raises(DomainError):
        Weight.of(1, 0) + Weight.of(1, 0, 0)


def test_identity_element():
    e = WeylElement.identity(3)
    assert e.is_identity()
    assert e.act(Weight.of(1, 2, 3)) == Weight.of(1, 2, 3)


def _random_weights(count, seed, rank=2):
    rng = np.random.default_rng(seed)
    return [Weight.of(*(F(int(k), 4) for k in row)) for row in rng.integers(-8, 9, size=(count, rank))]


def test_cartan_bar_inverts_cartan_transpose():
    for family, rank in [("B", 2), ("C", 2), ("B", 3), ("C", 4)]:
        rd = build_root_datum(family, rank)
        product = sympy.Matrix(rd.cartan_bar) * sympy.Matrix(rd.cartan).T
        assert product == sympy.eye(rank)


def test_coweights_dual_to_simple_roots():
    for family, rank in [("B", 2), ("C", 2), ("B", 3)]:
        rd = build_root_datum(family, rank)
        for i, alpha in enumerate(rd.simple_roots):
            for j, cw in enumerate(rd.fundamental_coweights):
                assert pairing(alpha, cw) == (1 if i == j else 0)


def test_c2_cartan_is_b2_transpose(b2):
    c2 = build_root_datum("C", 2)
    assert c2.cartan == tuple(zip(*b2.cartan))


def test_rho_pairings_b2(b2):
    first, second = b2.fundamental_coweights
    assert pairing(b2.weyl_vector, first) == F(3, 2)
    assert pairing(b2.weyl_vector, second) == 2


def test_b3_rho():
    assert build_root_datum("B", 3).weyl_vector == Weight.of(F(5, 2), F(3, 2), F(1, 2))


@pytest.mark.parametrize("family,rank", [("B", 4), ("C", 4)])
def test_weyl_group_order_formula(family, rank):
    rd = build_root_datum(family, rank)
    assert len(weyl_elements(rd)) == 2 ** rank * math.factorial(rank)


def test_dominance_boundary_case(b2):
    # second coweight constraint holds with equality
    assert dominance_leq(Weight.of(F(1, 2), F(1, 2)), Weight.of(F(3, 4), F(1, 4)), b2)
    assert not dominance_leq(b2.weyl_vector, Weight.zero(2), b2)


def test_dominance_is_a_partial_order(b2):
    weights = _random_weights(25, seed=11)
    # a few repeats and near neighbours so antisymmetry is exercised
    weights += [weights[0], weights[1] + Weight.of(F(1, 4), 0)]
    for nu in weights:
        assert dominance_leq(nu, nu, b2)
    for nu in weights:
        for mu in weights:
            if dominance_leq(nu, mu, b2) and dominance_leq(mu, nu, b2):
                assert nu == mu
            if not dominance_leq(nu, mu, b2):
                continue
            for kappa in weights:
                if dominance_leq(mu, kappa, b2):
                    assert dominance_leq(nu, kappa, b2)


def test_dominant_representative_dominates_orbit(b2):
    elements = weyl_elements(b2)
    for nu in _random_weights(30, seed=5):
        rep = dominant_representative(nu, b2)
        orbit = weyl_orbit(nu, elements)
        assert rep in orbit
        assert all(dominance_leq(x, rep, b2) for x in orbit)


def test_dominant_representative_examples(b2):
    assert dominant_representative(Weight.of(F(-1, 2), 0), b2) == Weight.of(F(1, 2), 0)
    assert dominant_representative(Weight.of(0, 1), b2) == Weight.of(1, 0)
    for nu in (Weight.of(F(3, 2), F(1, 2)), Weight.of(1, 1), Weight.zero(2)):
        assert dominant_representative(nu, b2) == nu
