import numpy as np
import pytest
from hypothesis import given, strategies as st

from markovfactor.algebra import (
    commutant,
    contains,
    diagonal_algebra,
    full_algebra,
    generate,
    is_abelian,
    join,
    span_distance,
    trivial_algebra,
)

from conftest import random_matrix, random_unitary

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def test_generate_no_generators_is_scalars():
    a = generate(3, [])
    assert a.dim == 1
    assert span_distance(a, trivial_algebra(3)) < 1e-14


def test_generate_pauli_pair_is_full():
    assert generate(2, [X, Z]).dim == 4


def test_generate_diagonal_matrix():
    a = generate(3, [np.diag([1.0, 2.0, 3.0])])
    assert a.dim == 3
    assert span_distance(a, diagonal_algebra(3)) < 1e-12


def test_generate_rejects_wrong_shape():
    with pytest.raises(ValueError):
        generate(3, [X])


def test_commutant_of_left_factor():
    left = generate(4, [np.kron(X, np.eye(2)), np.kron(Z, np.eye(2))])
    right = generate(4, [np.kron(np.eye(2), X), np.kron(np.eye(2), Z)])
    c = commutant(left)
    assert c.dim == 4
    assert span_distance(c, right) < 1e-12


def test_contains_offdiagonal_in_diagonal():
    assert contains(diagonal_algebra(2), X) == pytest.approx(1.0)
    assert contains(full_algebra(2), X) < 1e-15


def test_join_of_diagonal_and_flip():
    j = join(diagonal_algebra(2), generate(2, [X]))
    assert j.dim == 4


def test_join_with_self():
    d = diagonal_algebra(3)
    assert span_distance(join(d, d), d) < 1e-12


def test_is_abelian():
    assert is_abelian(diagonal_algebra(3))
    assert not is_abelian(full_algebra(2))


@given(st.integers(0, 2**32 - 1))
def test_double_commutant(seed):
    rng = np.random.default_rng(seed)
    # direct sum M_2 (+) C, rotated randomly inside M_3
    u = random_unitary(rng, 3)
    g = np.zeros((3, 3), dtype=complex)
    g[:2, :2] = random_matrix(rng, 2)
    g[2, 2] = rng.normal()
    a = generate(3, [u @ g @ u.conj().T])
    assert span_distance(commutant(commutant(a)), a) < 1e-9


@given(st.integers(0, 2**32 - 1))
def test_generated_algebra_is_closed(seed):
    rng = np.random.default_rng(seed)
    g = np.diag(rng.normal(size=2)).astype(complex)
    g = np.kron(g, np.eye(2)) + np.kron(np.eye(2), np.zeros((2, 2)))
    a = generate(4, [g, np.kron(np.eye(2), X)])
    res = a.closure_residuals()
    assert max(res.values()) < 1e-10
