import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diffmor.exactlin import InputError
from diffmor.fixtures import dual_numbers, field_algebra, fix2, fix3, random_fixture
from diffmor.structures import (
    DiffAlgebraMorphism,
    DifferentialAlgebra,
    PhiBimodule,
    mapping_module,
    mapping_ring,
    regular_bimodule,
    triangle_bimodule,
    triangle_phi_bimodule,
    validate,
)


def test_field_is_valid_for_any_weight():
    for lam in (0, 1, Fraction(1, 2), -3):
        assert validate(field_algebra(lam)).ok


def test_dual_numbers_with_euler_operator_valid():
    assert validate(dual_numbers(der=[[0, 0], [0, 1]])).ok


def test_operator_moving_unit_is_rejected():
    A = dual_numbers(der=[[1, 0], [0, 1]])
    rep = validate(A)
    assert not rep.ok
    assert (0, 0) in {v.indices for v in rep.violations if v.axiom == "leibniz"}


def test_validator_lists_every_violation():
    A = dual_numbers()
    mul = A.mul.copy()
    mul[1, 1, 0] = Fraction(1)  # x*x = 1, still associative
    mul[1, 0, 1] = Fraction(2)  # breaks the unit and associativity
    bad = DifferentialAlgebra(2, mul, A.unit, 0, A.der)
    rep = validate(bad)
    assert {"associativity", "right_unit"} <= rep.axioms()
    assert len(rep.violations) > 2


def test_dimension_mismatch_is_input_error():
    with pytest.raises(InputError):
        DifferentialAlgebra(2, np.zeros((2, 2, 1), dtype=object), [1, 0], 0, [[0, 0], [0, 0]])
    F = field_algebra()
    with pytest.raises(InputError):
        DiffAlgebraMorphism(F, F, [[1, 0]])


def test_triangle_is_identity_when_weight_or_operator_vanishes():
    P = fix2()  # weight 0
    assert triangle_bimodule(P.M).same_actions(P.M)
    A = dual_numbers(weight=1)  # zero operator
    M = regular_bimodule(A)
    assert triangle_bimodule(M).same_actions(M)


def test_triangle_on_dual_numbers_weight_one():
    M = triangle_bimodule(fix3().M)
    x = [0, 1]
    assert list(M.act_left(x, x)) == [0, 0]
    assert list(M.act_left([1, 0], x)) == [0, 1]
    # x |> 1 = (x + d x) 1 = 2x
    assert list(M.act_left(x, [1, 0])) == [0, 2]


def test_mapping_ring_products_for_identity_on_field():
    F = field_algebra()
    R = mapping_ring(DiffAlgebraMorphism(F, F, [[1]]))
    assert R.dim == 3 and list(R.unit) == [1, 1, 0]
    e_a, e_b, e_p = [1, 0, 0], [0, 1, 0], [0, 0, 1]
    assert list(R.product(e_b, e_a)) == [0, 0, 0]
    assert list(R.product(e_p, e_a)) == [0, 0, 1]
    assert list(R.product(e_b, e_p)) == [0, 0, 1]
    assert list(R.product(e_a, e_p)) == [0, 0, 0]
    assert list(R.product(e_p, e_p)) == [0, 0, 0]


def test_mapping_module_of_self_coefficients_is_regular():
    P = fix2()
    R = mapping_ring(P.morphism)
    W = mapping_module(P, R)
    assert W.same_actions(regular_bimodule(R))


def test_mapping_module_right_action_phi_part():
    P = fix2()
    W = mapping_module(P)
    # (x_A) acting on the right of 1_N.phi gives (1 * phi(x)) phi = 0; 1_A gives 1_N.phi
    n_phi = [0, 0, 0, 1]
    assert list(W.act_right(n_phi, [1, 0, 0, 0])) == [0, 0, 0, 1]
    assert list(W.act_right(n_phi, [0, 1, 0, 0])) == [0, 0, 0, 0]
    # n_1 (b phi) = (n_1 b) phi
    assert list(W.act_right([0, 0, 1, 0], [0, 0, 0, 1])) == [0, 0, 0, 1]


def test_validation_of_named_fixtures(named):
    name, P = named
    assert validate(P).ok, name
    assert validate(triangle_phi_bimodule(P), differential=False).ok
    R = mapping_ring(P.morphism)
    assert validate(R).ok
    assert validate(mapping_module(P, R)).ok
    assert not np.any(P.A.der.dot(P.A.unit) != 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_random_fixtures_and_derived_objects_are_valid(seed):
    P = random_fixture(random.Random(seed))
    assert validate(P).ok
    assert validate(triangle_phi_bimodule(P), differential=False).ok
    R = mapping_ring(P.morphism)
    assert validate(R).ok
    assert validate(mapping_module(P, R)).ok
    assert not np.any(P.A.der.dot(P.A.unit) != 0)
    if P.A.weight == 0:
        assert triangle_bimodule(P.M).same_actions(P.M)


def test_bad_psi_is_reported():
    P = fix2()
    broken = PhiBimodule(P.morphism, P.M, P.N, [[1, 1]])
    assert "psi_left" in validate(broken).axioms()
