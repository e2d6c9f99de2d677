import numpy as np
import pytest

from markovfactor.algebra import full_algebra, trivial_algebra
from markovfactor.channel import require_markov
from markovfactor.factorize import JHat, beta_images, certify, deterministic_factorize, jhat_abelian, jhat_deterministic
from markovfactor.fixtures import FIXTURES, coupling, depolarizing, symmetric_chain, SYMMETRIC_T
from markovfactor.gce import cone_vector, gce_factorization, gce_map, nablas, standard_form, vector_state_residual
from markovfactor.linalg import AntilinearOp, vec
from markovfactor.stinespring import dilate

CANONICAL = sorted(n for n, f in FIXTURES.items() if f.deterministic or f.abelian)


def canonical_jhat(name, phi):
    return jhat_deterministic(phi) if FIXTURES[name].deterministic else jhat_abelian(phi)


def test_standard_form_of_scalars():
    SF = standard_form(trivial_algebra(1))
    assert SF.dim == 1
    np.testing.assert_allclose(SF.J.mat, [[1.0]])


def test_standard_form_of_m2():
    SF = standard_form(full_algebra(2))
    assert SF.dim == 4
    np.testing.assert_allclose(SF.space.Delta, np.eye(4), atol=1e-14)


def test_cone_vector_of_trace_is_cyclic_vector():
    SF = standard_form(full_algebra(2))
    xi = cone_vector(SF, np.eye(2) / 2)
    np.testing.assert_allclose(xi, SF.omega_tau, atol=1e-14)


def test_cone_vector_of_diagonal_density():
    SF = standard_form(full_algebra(2))
    rho = np.diag([2 / 3, 1 / 3])
    xi = cone_vector(SF, rho)
    np.testing.assert_allclose(xi, vec(np.diag(np.sqrt([2 / 3, 1 / 3]))), atol=1e-14)
    assert vector_state_residual(SF, xi, rho) < 1e-14
    assert SF.cone_residual(xi) < 1e-14


def test_cone_vector_of_impure_direction_is_positive():
    SF = standard_form(full_algebra(2))
    rho = np.array([[0.5, 0.2j], [-0.2j, 0.5]])
    xi = cone_vector(SF, rho)
    assert SF.cone_residual(xi) < 1e-13
    assert SF.cone_residual(-xi) > 0.1


@pytest.fixture(scope="module")
def chain_setup():
    phi = symmetric_chain()
    jh = jhat_abelian(phi)
    C = certify(phi, jh)
    D = C.dilation
    SF = standard_form(C.R)
    xi = cone_vector(SF, C.omega)
    beta = beta_images(D, jh)
    atoms = {(i, j): D.sigma[i] @ beta[j] for i in range(2) for j in range(2)}
    return phi, C, D, SF, xi, beta, atoms


def test_abelian_cone_vector_is_root_of_coupling(chain_setup):
    _, _, _, SF, xi, _, atoms = chain_setup
    pi = coupling(SYMMETRIC_T, [0.5, 0.5])
    for (i, j), P in atoms.items():
        e = SF.represent(P) @ SF.omega_tau
        e = e / np.linalg.norm(e)
        assert np.vdot(e, xi) == pytest.approx(np.sqrt(pi[i, j]), abs=1e-12)


def test_abelian_nablas_are_weighted_marginal_embeddings(chain_setup):
    phi, _, D, SF, xi, beta, atoms = chain_setup
    pi = coupling(SYMMETRIC_T, [0.5, 0.5])
    n1, n2 = nablas(D, beta, SF, xi)
    S1, S2 = phi.source, phi.target
    unit = {k: SF.represent(P) @ SF.omega_tau / np.linalg.norm(SF.represent(P) @ SF.omega_tau) for k, P in atoms.items()}
    p2, p1 = pi.sum(axis=1), pi.sum(axis=0)
    for i in range(2):
        v = S2.vectors[:, i] / np.linalg.norm(S2.vectors[:, i])
        want = sum(np.sqrt(pi[i, j] / p2[i]) * unit[i, j] for j in range(2))
        np.testing.assert_allclose(n2 @ v, want, atol=1e-12)
    for j in range(2):
        v = S1.vectors[:, j] / np.linalg.norm(S1.vectors[:, j])
        want = sum(np.sqrt(pi[i, j] / p1[j]) * unit[i, j] for i in range(2))
        np.testing.assert_allclose(n1 @ v, want, atol=1e-12)


def test_abelian_expectations_are_classical_conditionals(chain_setup):
    phi, C, D, SF, xi, beta, atoms = chain_setup
    pi = coupling(SYMMETRIC_T, [0.5, 0.5])
    n1, n2 = nablas(D, beta, SF, xi)
    S1, S2 = phi.source, phi.target
    E1 = gce_map(SF, n1, S1, xi)
    E2 = gce_map(SF, n2, S2, xi)

    def apply(E, x):
        return np.einsum("k,kij->ij", C.R.coefficients(x), E.images)

    p2, p1 = pi.sum(axis=1), pi.sum(axis=0)
    for (i, j), P in atoms.items():
        np.testing.assert_allclose(apply(E2, P), pi[i, j] / p2[i] * S2.pi[i], atol=1e-12)
        np.testing.assert_allclose(apply(E1, P), pi[i, j] / p1[j] * S1.pi[j], atol=1e-12)


@pytest.mark.parametrize("name", CANONICAL)
def test_gce_route_on_canonical_fixtures(name, built):
    phi = built[name]
    rep = gce_factorization(phi, canonical_jhat(name, phi))
    assert rep.cce_pass
    assert rep.ok
    assert rep.remark1["remark1-fwd"] and rep.remark1["remark1-bwd"]
    assert max(rep.residuals.values()) <= 1e-8, rep.residuals


def test_gce_certificate_matches_deterministic_one(built):
    phi = built["hadamard"]
    a = gce_factorization(phi, jhat_deterministic(phi)).certificate
    b = deterministic_factorize(phi)
    basis = phi.source.algebra.basis
    for f in basis:
        for g in basis:
            assert abs(a.moment(f, g) - b.moment(f, g)) <= 1e-9

    def word(C, f1, g1, f2, g2):
        D = C.dilation
        al = [D.sigma_of(f) for f in (f1, f2)]
        be = [np.einsum("k,kij->ij", D.target.algebra.coefficients(g), C.beta_images) for g in (g1, g2)]
        return np.vdot(C.omega, al[0] @ be[0] @ al[1] @ be[1] @ C.omega)

    rng = np.random.default_rng(0)
    for _ in range(5):
        f1, g1, f2, g2 = (basis[k] for k in rng.integers(0, 4, size=4))
        assert abs(word(a, f1, g1, f2, g2) - word(b, f1, g1, f2, g2)) <= 1e-9


def test_wrong_jhat_fails_compatibility():
    phi = depolarizing(0.5)
    D = dilate(require_markov(phi))
    rep = gce_factorization(phi, JHat(AntilinearOp(np.eye(D.L_dim)), "user-supplied"))
    assert not rep.cce_pass
    assert rep.certificate is None
    assert rep.residuals["CCE-1"] >= 1e-3
    assert rep.remark1["remark1-fwd"] and rep.remark1["remark1-bwd"]
