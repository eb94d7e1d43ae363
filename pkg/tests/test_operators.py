import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import block_diag, polar

from cstar_inv import sampling as smp
from cstar_inv.algebra import DEFAULT_TOL
from cstar_inv.errors import ShapeMismatch
from cstar_inv.module import inner_product, rank_one, right_action
from cstar_inv.operators import (Operator, adjoint, apply, canonical_projections, compose, identity_operator,
                                 is_partial_isometry, kernel_projection, moore_penrose, operator_norm,
                                 penrose_residuals, tikhonov_inverse, verify_adjoint_contract,
                                 zero_operator)

from helpers import scalar_op


def test_apply_identity(rng):
    x = smp.random_vector(rng, (1, 2), 3)
    assert apply(identity_operator((1, 2), 3), x).allclose(x)


def test_apply_rank_one(rng):
    u, v, z = (smp.random_vector(rng, (2,), 2) for _ in range(3))
    assert apply(rank_one(u, v), z).allclose(right_action(u, inner_product(v, z)))


def test_apply_is_a_linear(rng):
    T = smp.random_operator(rng, (2, 3), 2)
    x, a = smp.random_vector(rng, (2, 3), 2), smp.random_element(rng, (2, 3))
    lhs, rhs = apply(T, right_action(x, a)), right_action(apply(T, x), a)
    assert (lhs - rhs).norm() <= DEFAULT_TOL.threshold(T.norm() * x.norm() * a.norm())


def test_compose_examples(rng):
    T = smp.random_operator(rng, (1, 2), 2)
    assert compose(T, T.identity()).allclose(T)
    assert compose(scalar_op([[1, 0], [0, 0]]), scalar_op([[0, 0], [0, 1]])).norm() == 0.0


def test_compose_associative_and_matches_apply(rng):
    A, B, C = (smp.random_operator(rng, (1, 2), 3) for _ in range(3))
    lhs, rhs = compose(compose(A, B), C), compose(A, compose(B, C))
    assert (lhs - rhs).norm() <= DEFAULT_TOL.threshold(A.norm() * B.norm() * C.norm())
    x = smp.random_vector(rng, (1, 2), 3)
    assert apply(compose(A, B), x).allclose(apply(A, apply(B, x)))


def test_compose_shape_mismatch(rng):
    with pytest.raises(ShapeMismatch):
        compose(smp.random_operator(rng, (1,), 2), smp.random_operator(rng, (1,), 3))


def test_adjoint_examples(rng):
    x, y = smp.random_vector(rng, (1, 2), 2), smp.random_vector(rng, (1, 2), 2)
    assert adjoint(rank_one(x, y)).allclose(rank_one(y, x))
    assert adjoint(identity_operator((2,), 3)).allclose(identity_operator((2,), 3))
    T = smp.random_operator(rng, (2, 3), 3)
    assert verify_adjoint_contract(T, rng=rng) <= DEFAULT_TOL.rtol
    assert adjoint(adjoint(T)).allclose(T)


def test_operator_norm_examples(rng):
    assert operator_norm(scalar_op([[1, 0], [0, 0]])) == pytest.approx(1.0)
    assert operator_norm(scalar_op([[2, 0], [0, 0]])) == pytest.approx(2.0)
    T = smp.random_operator(rng, (1, 2), 3)
    assert abs(operator_norm(T.H @ T) - operator_norm(T) ** 2) <= DEFAULT_TOL.threshold(T.norm() ** 2)
    assert operator_norm(T) == pytest.approx(np.linalg.norm(block_diag(*T.blocks), 2))


def test_grid_roundtrip(rng):
    T = smp.random_operator(rng, (1, 2), 3)
    assert Operator.from_grid(T.to_grid()).allclose(T)
    grid = T.to_grid()
    assert len(grid) == 3 and all(len(r) == 3 for r in grid)


def test_moore_penrose_examples():
    assert moore_penrose(scalar_op([[2, 0], [0, 0]])).allclose(scalar_op([[0.5, 0], [0, 0]]))
    P = rank_one(*(2 * [smp.random_vector(np.random.default_rng(1), (1,), 3)]))
    P = P * (1 / P.norm())
    assert moore_penrose(P).allclose(P)
    assert moore_penrose(zero_operator((2,), 2)).norm() == 0.0


def test_moore_penrose_agrees_with_tikhonov_and_numpy(rng):
    for j in range(20):
        shape, k = smp.random_shape_rank(rng)
        T = (smp.random_rank_deficient if j % 2 else smp.random_operator)(rng, shape, k)
        X = moore_penrose(T)
        scale = max(X.norm(), 1e-300)
        assert (X - tikhonov_inverse(T)).norm() <= 1e-6 * scale
        ref = np.linalg.pinv(block_diag(*T.blocks))
        assert np.linalg.norm(block_diag(*X.blocks) - ref, 2) <= 1e-8 * max(scale, 1.0)


def test_canonical_projections():
    r, c = canonical_projections(scalar_op([[2, 0], [0, 0]]))
    assert r.allclose(scalar_op([[1, 0], [0, 0]]))
    assert c.allclose(scalar_op([[1, 0], [0, 0]]))
    r, c = canonical_projections(scalar_op([[1, 2], [3, 4]]))
    assert r.allclose(r.identity()) and c.allclose(c.identity())


def test_range_projection_fixes_range(rng):
    T = smp.random_rank_deficient(rng, (1, 2), 3)
    R, _ = canonical_projections(T)
    x = smp.random_vector(rng, (1, 2), 3)
    assert apply(R, apply(T, x)).allclose(apply(T, x))


def test_kernel_and_corange_split_identity(rng):
    T = smp.random_rank_deficient(rng, (2, 3), 2)
    _, C = canonical_projections(T)
    K = kernel_projection(T)
    assert (K + C).allclose(T.identity())
    assert (K @ C).norm() <= DEFAULT_TOL.threshold(1.0)
    assert (T @ K).norm() <= DEFAULT_TOL.threshold(T.norm())


def test_noise_block_counts_as_zero_in_rank(rng):
    big = smp.complex_gaussian(rng, 2, 2)
    tiny = 1e-17 * smp.complex_gaussian(rng, 4, 4)
    T = Operator((1, 2), 2, [big, tiny])
    assert np.allclose(kernel_projection(T).blocks[1], np.eye(4))
    assert moore_penrose(T).blocks[1].max() == 0.0


def test_is_partial_isometry(rng):
    P = smp.random_invariant_pair(rng, (1,), 3, reducing=True)[1]
    assert is_partial_isometry(P)
    assert not is_partial_isometry(scalar_op([[2, 0], [0, 0]]))
    # polar factor of a rank-deficient matrix, restricted to its range
    T = smp.random_rank_deficient(rng, (2,), 2)
    blocks = []
    for b in T.blocks:
        u, _ = polar(b)
        R = np.linalg.pinv(b) @ b
        blocks.append(u @ R)
    assert is_partial_isometry(Operator(T.shape, T.rank, blocks))


def test_shifted_operator_has_complemented_range(rng):
    K = smp.random_operator(rng, (1, 2), 2)
    lam = 0.7 + 0.2j
    L = K.identity() * lam - K
    assert (L @ moore_penrose(L) @ L - L).norm() <= DEFAULT_TOL.threshold(L.norm())


@st.composite
def operators(draw):
    shape = draw(st.sampled_from(smp.SHAPES))
    k = draw(st.sampled_from(smp.RANKS))
    rng = np.random.default_rng(draw(st.integers(0, 2 ** 32 - 1)))
    deficient = draw(st.booleans())
    T = (smp.random_rank_deficient if deficient else smp.random_operator)(rng, shape, k)
    return T * draw(st.floats(1e-3, 1e3))


@settings(max_examples=80, deadline=None)
@given(operators())
def test_penrose_identities(T):
    thr = DEFAULT_TOL.threshold(T.norm())
    X = moore_penrose(T)
    res = penrose_residuals(T, X)
    assert res["TXT=T"] <= thr
    assert res["(TX)*=TX"] <= thr and res["(XT)*=XT"] <= thr
    assert res["XTX=X"] <= DEFAULT_TOL.threshold(X.norm())
