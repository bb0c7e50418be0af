import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopfpoly.quat_geom import (
    Quaternion,
    frame_hopf,
    from_complex_pair,
    hopf,
    hopf_complex,
    hopf_planar,
    norm_sq,
    quat_conj,
    quat_mul,
    to_complex_pair,
)

# Oracle: quaternion product from the multiplication table of the basis
# units, written independently of the closed-form product in the library.
_UNITS = "1ijk"
_TABLE = {
    ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
    ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
    ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
    ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
}


def table_mul(p, q):
    out = dict.fromkeys(_UNITS, 0.0)
    for a, pa in zip(_UNITS, p):
        for b, qb in zip(_UNITS, q):
            sign, unit = _TABLE[(a, b)]
            out[unit] += sign * pa * qb
    return np.array([out[u] for u in _UNITS])


def table_hopf(q):
    qbar = np.array([q[0], -q[1], -q[2], -q[3]])
    r = table_mul(table_mul(qbar, [0, 1, 0, 0]), q)
    assert abs(r[0]) < 1e-9 * (1 + np.dot(q, q))
    return r[1:]


finite = st.floats(-10, 10, allow_nan=False)
quats = st.tuples(finite, finite, finite, finite)


def test_basis_products():
    i, j, k = [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]
    assert np.array_equal(quat_mul(i, j), k)
    assert np.array_equal(quat_mul(j, i), [0, 0, 0, -1])
    assert np.array_equal(quat_mul(j, k), i)
    assert np.array_equal(quat_conj([1, 1, 0, 0]), [1, -1, 0, 0])
    assert Quaternion(0, 1, 0, 0) * Quaternion(0, 0, 1, 0) == Quaternion(0, 0, 0, 1)


@given(quats, quats)
def test_product_matches_table(p, q):
    assert np.allclose(quat_mul(p, q), table_mul(p, q), atol=1e-9)


@given(quats, quats)
def test_conjugate_reverses_product(p, q):
    lhs = quat_conj(quat_mul(p, q))
    rhs = quat_mul(quat_conj(q), quat_conj(p))
    assert np.allclose(lhs, rhs, atol=1e-9)


@given(quats, quats)
def test_norm_is_multiplicative(p, q):
    assert math.isclose(norm_sq(quat_mul(p, q)), norm_sq(p) * norm_sq(q), rel_tol=1e-12, abs_tol=1e-12)


def test_norm_zero_only_at_origin():
    assert norm_sq([0, 0, 0, 0]) == 0
    assert norm_sq([0, 0, 1e-200, 0]) >= 0
    assert Quaternion(1, 2, 3, 4).norm_sq() == 30


@pytest.mark.parametrize(
    "q, expected",
    [((1, 0, 0, 0), (1, 0, 0)), ((0, 0, 1, 0), (-1, 0, 0)), ((1, 0, 1, 0), (0, 0, 2))],
)
def test_hopf_examples(q, expected):
    assert np.allclose(hopf(q), expected, atol=1e-15)
    assert np.allclose(table_hopf(np.array(q, float)), expected, atol=1e-15)


@given(quats)
def test_hopf_matches_conjugation_oracle(q):
    assert np.allclose(hopf(q), table_hopf(np.array(q)), atol=1e-9)


def test_hopf_squares_norms_bulk():
    rng = np.random.default_rng(11)
    q = rng.uniform(-10, 10, size=(10_000, 4))
    assert np.allclose(np.linalg.norm(hopf(q), axis=1), norm_sq(q), rtol=1e-12, atol=0)


@pytest.mark.parametrize(
    "a, b, expected",
    [(1, 0, (1, 0, 0)), (0, 1j, (-1, 0, 0)), (1 / math.sqrt(2), 1 / math.sqrt(2), (0, 0, 1))],
)
def test_hopf_complex_examples(a, b, expected):
    assert np.allclose(hopf_complex(a, b), expected, atol=1e-15)


@given(quats)
def test_hopf_complex_agrees_with_hopf(q):
    a, b = to_complex_pair(q)
    assert np.allclose(hopf_complex(a, b), hopf(q), atol=1e-14 * (1 + norm_sq(q)))
    assert np.allclose(from_complex_pair(a, b), q)


@pytest.mark.parametrize(
    "a, b, expected",
    [(1, 0, (1, 0)), (1 / math.sqrt(2), 1 / math.sqrt(2), (0, 1)), (0, 1, (-1, 0))],
)
def test_hopf_planar_examples(a, b, expected):
    assert np.allclose(hopf_planar(a, b), expected, atol=1e-15)


@given(finite, finite)
def test_planar_is_real_slice_of_complex(a, b):
    x, z = hopf_planar(a, b)
    assert np.allclose(hopf_complex(a, b), [x, 0.0, z], atol=1e-12)
    assert math.isclose(math.hypot(x, z), a * a + b * b, rel_tol=1e-12, abs_tol=1e-300)


def test_frame_identity_and_double_cover():
    assert np.array_equal(frame_hopf([1, 0, 0, 0]), np.eye(3))
    q = np.array([0.3, -0.5, 0.2, 0.7])
    assert np.array_equal(frame_hopf(q), frame_hopf(-q))


def test_frame_rotation_about_i():
    theta = math.pi / 2
    m = frame_hopf([math.cos(theta / 2), math.sin(theta / 2), 0, 0])
    c, s = math.cos(theta), math.sin(theta)
    # Conjugation conj(q) v q turns vectors by -theta about i (passive form).
    expected = np.array([[1, 0, 0], [0, c, s], [0, -s, c]])
    assert np.allclose(m, expected, atol=1e-15)
    assert np.allclose(m @ [1, 0, 0], [1, 0, 0])


@given(quats)
def test_frame_columns_orthogonal_with_common_norm(q):
    m = frame_hopf(q)
    ns = norm_sq(q)
    gram = m.T @ m
    assert np.allclose(np.diag(gram), ns * ns, rtol=1e-12, atol=1e-300)
    off = gram - np.diag(np.diag(gram))
    assert np.max(np.abs(off)) <= 1e-10 * max(ns * ns, 1e-300)
    assert np.allclose(m[:, 0], hopf(q), atol=1e-12 * (1 + ns))


@settings(max_examples=200)
@given(quats, quats)
def test_conjugation_identity(q, p):
    p = np.array(p)
    if norm_sq(p) < 1e-6:
        return
    p = p / math.sqrt(norm_sq(p))
    m = frame_hopf(p)
    assert np.allclose(hopf(quat_mul(q, p)), m @ hopf(q), atol=1e-10 * (1 + norm_sq(q)))
    assert math.isclose(np.linalg.det(m), 1.0, rel_tol=1e-10)


@given(quats)
def test_sign_flip_map(q):
    w, x, y, z = q
    assert np.allclose(hopf((y, -z, -w, x)), -hopf(q), atol=1e-12 * (1 + norm_sq(q)))


def test_batch_shapes():
    q = np.zeros((5, 7, 4))
    q[..., 0] = 1
    assert hopf(q).shape == (5, 7, 3)
    assert frame_hopf(q).shape == (5, 7, 3, 3)
    with pytest.raises(ValueError):
        hopf(np.zeros(3))
