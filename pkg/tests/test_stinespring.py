import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from markovfactor.algebra import FiniteAlgebra, full_algebra
from markovfactor.channel import make_map
from markovfactor.factorize import jhat_abelian
from markovfactor.fixtures import (
    FIXTURES,
    centralizer_mixture,
    depolarizing,
    identity_map,
    symmetric_chain,
)
from markovfactor.linalg import anti_compose, opnorm
from markovfactor.space import ProbabilitySpace, gns
from markovfactor.stinespring import CommutantError, dilate, tau_of, verify_relations, w_antiunitary


def test_identity_dimension(trace_space):
    assert dilate(identity_map(trace_space)).L_dim == 4


def test_depolarizing_half_dimension():
    assert dilate(depolarizing(0.5)).L_dim == 16


def test_completely_depolarizing_dimension_matches_oracle():
    # Phi(A) = phi(A) 1: the Gram is [phi(E_i^H E_j)] (x) 1 on the GNS space
    units = full_algebra(2).basis
    g = np.array([[np.trace(a.conj().T @ b) / 2 for b in units] for a in units])
    oracle = np.linalg.matrix_rank(np.kron(g, np.eye(4)))
    assert oracle == 16
    assert dilate(depolarizing(1.0)).L_dim == oracle


def test_tau_of_identity(trace_space):
    D = dilate(identity_map(trace_space))
    np.testing.assert_allclose(tau_of(D, np.eye(4)), np.eye(D.L_dim), atol=1e-13)


def test_tau_rejects_non_commutant(trace_space):
    D = dilate(identity_map(trace_space))
    with pytest.raises(CommutantError):
        tau_of(D, trace_space.represent(np.array([[0, 1], [0, 0]])))


def test_tau_abelian_indicator():
    # Gram is diag(3/4, 1/4, 1/4, 3/4), so tau(Y) = 1 (x) Y in these coordinates
    D = dilate(symmetric_chain())
    np.testing.assert_allclose(D.embed, np.diag(np.sqrt([0.75, 0.25, 0.25, 0.75])), atol=1e-14)
    np.testing.assert_allclose(tau_of(D, np.diag([1.0, 0.0])), np.diag([1.0, 0.0, 1.0, 0.0]), atol=1e-14)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_relations_on_fixtures(name, built):
    res = verify_relations(dilate(built[name]))
    assert res["st5"] is not None
    assert max(res.values()) <= 1e-8, res


def test_reordered_basis_gives_equivalent_dilation():
    perm = [3, 1, 0, 2]
    rho = np.eye(2) / 2
    A = full_algebra(2)
    S1 = gns(ProbabilitySpace(A, rho))
    S1p = gns(ProbabilitySpace(FiniteAlgebra(A.basis[perm]), rho))
    S2 = gns(ProbabilitySpace(A, rho))

    def act(a):
        return 0.5 * a + 0.25 * np.trace(a) * np.eye(2)

    D1 = dilate(make_map(S1, S2, act))
    D2 = dilate(make_map(S1p, S2, act))
    assert D1.L_dim == D2.L_dim
    N = S2.dim
    Q = np.kron(np.eye(4)[perm], np.eye(N))  # old spanning coordinates -> new
    X = np.linalg.lstsq(D1.embed.T, (D2.embed @ Q).T, rcond=None)[0].T
    assert opnorm(X @ D1.embed - D2.embed @ Q) < 1e-10
    assert opnorm(X.conj().T @ X - np.eye(D1.L_dim)) < 1e-10
    for a in A.basis:
        assert opnorm(X @ D1.sigma_of(a) @ X.conj().T - D2.sigma_of(a)) < 1e-10


def test_w_antiunitary_depolarizing():
    wd = w_antiunitary(depolarizing(0.25))
    assert max(wd.residuals.values()) <= 1e-10


def test_w_is_self_adjoint_involution_for_abelian_chain():
    op = jhat_abelian(symmetric_chain()).op
    np.testing.assert_allclose(anti_compose(op, op), np.eye(4), atol=1e-12)
    np.testing.assert_allclose(op.mat.T, op.mat, atol=1e-12)


@settings(max_examples=8)
@given(st.integers(0, 2**32 - 1))
def test_relations_on_random_mixtures(seed):
    D = dilate(centralizer_mixture(np.random.default_rng(seed)))
    res = verify_relations(D)
    assert max(res.values()) <= 1e-8, res


@settings(max_examples=8)
@given(st.integers(0, 2**32 - 1))
def test_w_relations_on_random_mixtures(seed):
    wd = w_antiunitary(centralizer_mixture(np.random.default_rng(seed)))
    assert max(wd.residuals.values()) <= 1e-8, wd.residuals
