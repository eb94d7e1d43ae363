import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cstar_inv import sampling as smp
from cstar_inv.algebra import DEFAULT_TOL, identity, is_positive, mul, star, zero
from cstar_inv.errors import ShapeMismatch
from cstar_inv.module import ModuleVector, inner_product, rank_one, right_action, vector_norm
from cstar_inv.operators import apply, is_orthogonal_projection, verify_adjoint_contract

from helpers import element, scalar_op, scalar_vec


def test_inner_product_orthogonal_coordinates():
    assert inner_product(scalar_vec(1, 0), scalar_vec(0, 1)).norm() == 0.0


def test_inner_product_of_first_unit_vector_is_identity():
    for shape, k in [((1,), 3), ((2, 3), 2)]:
        e = ModuleVector.basis(shape, k, 0)
        assert inner_product(e, e).allclose(identity(shape))


def test_inner_product_right_linearity(rng):
    x, y = smp.random_vector(rng, (1, 2), 3), smp.random_vector(rng, (1, 2), 3)
    a = smp.random_element(rng, (1, 2))
    # oracle: the sum over entries of x_j^* y_j a, formed entry by entry
    expected = zero((1, 2))
    for xj, yj in zip(x.entries, y.entries):
        expected = expected + mul(mul(star(xj), yj), a)
    assert inner_product(x, right_action(y, a)).allclose(expected)


def test_vector_norm_examples():
    assert vector_norm(ModuleVector.basis((2,), 2, 1)) == pytest.approx(1.0)
    assert vector_norm(scalar_vec(3, 4)) == pytest.approx(5.0)
    x = ModuleVector.from_entries([element([[1, 0], [0, 2]])])
    assert vector_norm(x) == pytest.approx(2.0)


def test_right_action_units(rng):
    x = smp.random_vector(rng, (2, 3), 2)
    assert right_action(x, identity((2, 3))).allclose(x)
    assert right_action(x, zero((2, 3))).norm() == 0.0


def test_right_action_associative(rng):
    x = smp.random_vector(rng, (1, 2), 2)
    a, b = smp.random_element(rng, (1, 2)), smp.random_element(rng, (1, 2))
    assert right_action(right_action(x, a), b).allclose(right_action(x, mul(a, b)))


def test_right_action_shape_mismatch(rng):
    with pytest.raises(ShapeMismatch):
        right_action(smp.random_vector(rng, (1,), 2), smp.random_element(rng, (2,)))
    with pytest.raises(ShapeMismatch):
        inner_product(smp.random_vector(rng, (1,), 2), smp.random_vector(rng, (1,), 3))


def test_rank_one_coordinate_projection():
    e1 = scalar_vec(1, 0)
    theta = rank_one(e1, e1)
    assert theta.allclose(scalar_op([[1, 0], [0, 0]]))
    assert is_orthogonal_projection(theta)


def test_rank_one_action_matches_definition(rng):
    x, y, z = (smp.random_vector(rng, (2, 3), 2) for _ in range(3))
    theta = rank_one(x, y)
    assert apply(theta, z).allclose(right_action(x, inner_product(y, z)))


def test_rank_one_adjoint(rng):
    x, y = smp.random_vector(rng, (1, 2), 3), smp.random_vector(rng, (1, 2), 3)
    assert rank_one(x, y).H.allclose(rank_one(y, x))


def test_entries_roundtrip(rng):
    x = smp.random_vector(rng, (1, 2), 3)
    assert ModuleVector.from_entries(x.entries).allclose(x)
    assert len(x.entries) == 3


@st.composite
def vector_pairs(draw):
    shape = draw(st.sampled_from(smp.SHAPES))
    k = draw(st.sampled_from(smp.RANKS))
    rng = np.random.default_rng(draw(st.integers(0, 2 ** 32 - 1)))
    scale = draw(st.floats(1e-2, 1e2))
    return smp.random_vector(rng, shape, k) * scale, smp.random_vector(rng, shape, k), rng


@settings(max_examples=80, deadline=None)
@given(vector_pairs())
def test_cauchy_schwarz_and_symmetry(data):
    x, y, _ = data
    s = vector_norm(x) * vector_norm(y)
    assert inner_product(x, y).norm() <= s + DEFAULT_TOL.threshold(s)
    assert (star(inner_product(x, y)) - inner_product(y, x)).norm() <= DEFAULT_TOL.threshold(s)
    assert is_positive(inner_product(x, x))


@settings(max_examples=40, deadline=None)
@given(vector_pairs())
def test_additivity_and_rank_one_contract(data):
    x, y, rng = data
    z = smp.random_vector(rng, x.shape, x.rank)
    lam = complex(*rng.standard_normal(2))
    lhs = inner_product(x, y + z * lam)
    rhs = inner_product(x, y) + inner_product(x, z) * lam
    assert (lhs - rhs).norm() <= DEFAULT_TOL.threshold(vector_norm(x) * (vector_norm(y) + vector_norm(z)))
    assert verify_adjoint_contract(rank_one(x, y), rng=rng) <= DEFAULT_TOL.rtol


def test_zero_vector_has_zero_norm():
    assert vector_norm(ModuleVector.zeros((1, 2), 3)) == 0.0
