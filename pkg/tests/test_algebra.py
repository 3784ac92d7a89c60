import math

import numpy as np
import pytest

from ncstat.algebra import (
    AlgebraElement,
    AlgebraSpec,
    State,
    absolutely_continuous,
    direct_sum_algebras,
    element_from_blocks,
    hermitian_eigen,
    hermitian_exp,
    hermitian_log,
    hermitian_pinv,
    partial_trace_left,
    state_distance,
    support_projection,
    validate_state,
)
from ncstat.errors import AlgebraMismatchError, ShapeError


def test_algebra_spec_dimensions():
    a = AlgebraSpec((2, 3, 1))
    assert a.num_blocks == 3
    assert a.dim == 4 + 9 + 1
    assert a.side == 6
    assert AlgebraSpec((1, 1, 1)).dim == 3


def test_algebra_spec_rejects_bad_dims():
    with pytest.raises(ShapeError):
        AlgebraSpec(())
    with pytest.raises(ShapeError):
        AlgebraSpec((2, 0))
    with pytest.raises(ShapeError):
        AlgebraSpec((2, -1))


def test_identity_and_zero():
    a = AlgebraSpec((2, 3))
    one = a.identity()
    zero = a.zero()
    assert np.array_equal(one.blocks[0], np.eye(2))
    assert np.array_equal(one.blocks[1], np.eye(3))
    assert zero.norm() == 0.0


def test_matrix_units_span_and_order():
    a = AlgebraSpec((2, 1))
    units = list(a.matrix_units())
    assert len(units) == a.dim
    # column-major within each block: (i, j) runs j outer, i inner
    coords = [(b, i, j) for b, i, j, _ in units]
    assert coords == [(0, 0, 0), (0, 1, 0), (0, 0, 1), (0, 1, 1), (1, 0, 0)]
    total = units[0][3]
    for _, i, j, e in units[1:]:
        if i == j:
            total = total + e
    assert total.distance(a.identity()) == 0.0


def test_element_arithmetic():
    rng = np.random.default_rng(0)
    a = AlgebraSpec((2, 2))
    x = element_from_blocks(a, [rng.standard_normal((2, 2)) for _ in range(2)])
    y = element_from_blocks(a, [rng.standard_normal((2, 2)) for _ in range(2)])
    z = (x + y) @ x.adjoint() - 2.0 * y
    for b in range(2):
        want = (x.blocks[b] + y.blocks[b]) @ x.blocks[b].conj().T - 2.0 * y.blocks[b]
        assert np.allclose(z.blocks[b], want)
    assert (x @ x.adjoint()).is_hermitian()


def test_element_blocks_immutable():
    a = AlgebraSpec((2,))
    x = element_from_blocks(a, [np.eye(2)])
    with pytest.raises(ValueError):
        x.blocks[0][0, 0] = 5.0


def test_cross_algebra_ops_rejected():
    x = AlgebraSpec((2,)).identity()
    y = AlgebraSpec((3,)).identity()
    with pytest.raises(AlgebraMismatchError):
        x + y


def test_state_evaluation_is_trace_pairing():
    a = AlgebraSpec((2, 1))
    s = State(a, (np.array([[0.25, 0.1], [0.1, 0.25]]), np.array([[0.5]])))
    e = element_from_blocks(a, [np.array([[1.0, 2.0], [3.0, 4.0]]), np.array([[2.0]])])
    want = np.trace(s.densities[0] @ e.blocks[0]) + 1.0
    assert abs(s.evaluate(e) - want) < 1e-14


def test_state_distance_is_frobenius():
    a = AlgebraSpec((1, 1))
    s1 = State(a, (np.array([[0.5]]), np.array([[0.5]])))
    s2 = State(a, (np.array([[0.3]]), np.array([[0.7]])))
    assert abs(state_distance(s1, s2) - math.sqrt(0.08)) < 1e-14


def test_validate_state_flags_problems():
    a = AlgebraSpec((2,))
    good = State(a, (np.eye(2) / 2,))
    rep = validate_state(good)
    assert rep.ok and rep.faithful

    lopsided = State(a, (np.diag([1.0, 0.0]),))
    rep = validate_state(lopsided)
    assert rep.ok and not rep.faithful

    neg = State(a, (np.diag([1.5, -0.5]),))
    rep = validate_state(neg)
    assert not rep.ok
    kinds = {v.kind for v in rep.violations}
    assert "positivity" in kinds

    unnormalized = State(a, (np.eye(2),))
    rep = validate_state(unnormalized)
    assert any(v.kind == "normalization" for v in rep.violations)

    skew = State(a, (np.array([[0.5, 0.5], [0.0, 0.5]]),))
    rep = validate_state(skew)
    assert any(v.kind == "hermiticity" for v in rep.violations)


def test_partial_trace_left_tensor_oracle():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a, b = rng.integers(1, 4, size=2)
        left = rng.standard_normal((a, a)) + 1j * rng.standard_normal((a, a))
        right = rng.standard_normal((b, b)) + 1j * rng.standard_normal((b, b))
        got = partial_trace_left(np.kron(left, right), int(a), int(b))
        assert np.allclose(got, np.trace(left) * right, atol=1e-12)


def test_hermitian_eigen_rejects_nonhermitian():
    with pytest.raises(np.linalg.LinAlgError):
        hermitian_eigen(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_spectral_calculus_roundtrips():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(1, 6))
        h = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        h = (h + h.conj().T) / 2
        assert np.allclose(hermitian_log(hermitian_exp(h)), h, atol=1e-10)


def test_log_of_singular_matrix_uses_support():
    d = np.diag([1.0, 0.0])
    lg = hermitian_log(d)
    # 0 ln 0 = 0 convention: log vanishes off the support
    assert np.allclose(lg, np.zeros((2, 2)))
    assert np.allclose(hermitian_pinv(d, 1e-10), d)
    assert np.allclose(support_projection(d), np.diag([1.0, 0.0]))


def test_log_requires_psd():
    with pytest.raises(np.linalg.LinAlgError):
        hermitian_log(np.diag([1.0, -1.0]))


def test_absolute_continuity_blockwise():
    a = AlgebraSpec((2, 2))
    full = State(a, (np.eye(2) / 4, np.eye(2) / 4))
    partial = State(a, (np.diag([0.5, 0.0]), np.diag([0.5, 0.0])))
    assert absolutely_continuous(partial, full)
    assert not absolutely_continuous(full, partial)
    assert absolutely_continuous(partial, partial)

    # rotated support in one block is enough to break it
    v = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2)
    rotated = State(a, (v @ np.diag([0.5, 0.0]) @ v.T, np.diag([0.5, 0.0])))
    assert not absolutely_continuous(rotated, partial)


def test_direct_sum_algebras():
    c = direct_sum_algebras(AlgebraSpec((2, 1)), AlgebraSpec((3,)))
    assert c.block_dims == (2, 1, 3)


def test_maximally_mixed_is_tracial():
    a = AlgebraSpec((2, 3))
    s = a.maximally_mixed()
    rep = validate_state(s)
    assert rep.ok and rep.faithful
    # tracial: evaluation of xy equals evaluation of yx
    rng = np.random.default_rng(11)
    x = element_from_blocks(a, [rng.standard_normal((d, d)) for d in (2, 3)])
    y = element_from_blocks(a, [rng.standard_normal((d, d)) for d in (2, 3)])
    assert abs(s.evaluate(x @ y) - s.evaluate(y @ x)) < 1e-12
