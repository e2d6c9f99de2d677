"""Generalized conditional expectations onto the two legs of a factorization.

The algebra ``R`` on ``L`` (of ``Phi#``) is put in standard form through its
normalized trace. The state ``omega = <Omega, . Omega>`` is then implemented
by a cone vector ``xi``, and the isometries ``nabla_i`` send ``h_i`` into that
standard space. The compatibility ``J_s nabla_i = nabla_i J_i`` decides
whether the resulting expectations are the compressions by ``V`` and ``Lambda``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import FiniteAlgebra
from .channel import StochasticMap, cp_residual, require_markov
from .factorize import FactorizationCertificate, JHat, beta_images, certify, cyclic_rank, jhat_invariants
from .linalg import DEFAULT_TOL, AntilinearOp, Tolerance, NotPSDError, opnorm, psd_functions
from .space import ProbabilitySpace, StandardSpace, gns
from .stinespring import StinespringData, dilate


@dataclass(frozen=True, eq=False)
class StandardFormData:
    """Trace standard form of ``R``; its cone is ``{x Omega_tau : x >= 0}``."""

    space: StandardSpace

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def J(self) -> AntilinearOp:
        return self.space.J

    @property
    def omega_tau(self) -> np.ndarray:
        return self.space.omega

    def represent(self, x: np.ndarray) -> np.ndarray:
        return self.space.represent(x)

    @property
    def cone_generators(self) -> np.ndarray:
        """Vectors ``a J a Omega_tau`` for the rank-one positive parts ``a = b b^H`` of the basis."""
        S = self.space
        out = []
        for b in S.algebra.basis:
            a = S.represent(b @ b.conj().T)
            out.append(a @ S.J(a @ S.omega))
        return np.stack(out, axis=1)

    def cone_residual(self, xi: np.ndarray) -> float:
        """Distance-type witness for ``xi`` lying in the cone (0 means it does)."""
        S = self.space
        x = S.unrepresent(_vector_operator(S, xi))
        h = 0.5 * (x + x.conj().T)
        neg = max(0.0, -float(np.linalg.eigvalsh(h).min()))
        return max(neg, opnorm(x - h))


def _vector_operator(S: StandardSpace, xi: np.ndarray) -> np.ndarray:
    """The operator ``pi(x)`` with ``pi(x) Omega = xi``."""
    return S.represent_coeffs(S.vectors_inv @ xi)


def standard_form(R: FiniteAlgebra, tol: Tolerance = DEFAULT_TOL) -> StandardFormData:
    """GNS of the normalized ambient trace restricted to ``R``."""
    return StandardFormData(gns(ProbabilitySpace(R, np.eye(R.n, dtype=complex) / R.n, tol), tol))


def cone_vector(SF: StandardFormData, omega: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """The cone vector implementing a state on ``R``.

    ``omega`` is either a vector (the state ``X -> <omega, X omega>``) or a
    density matrix (the state ``X -> Tr(omega X)``).
    """
    S = SF.space
    R = S.algebra
    omega = np.asarray(omega, dtype=complex)
    ambient = np.outer(omega, omega.conj()) if omega.ndim == 1 else omega
    density = R.project(ambient)
    density = 0.5 * (density + density.conj().T)
    try:
        root, _, _ = psd_functions(R.n * density, tol)
    except NotPSDError as exc:
        raise ValueError(f"state is not positive on R: {exc}") from exc
    return S.vector(root)


def vector_state_residual(SF: StandardFormData, xi: np.ndarray, omega: np.ndarray) -> float:
    """``<xi, pi_s(X) xi>`` against the state given by ``omega`` (vector or density)."""
    R = SF.space.algebra
    omega = np.asarray(omega, dtype=complex)

    def state(x):
        return np.vdot(omega, x @ omega) if omega.ndim == 1 else np.trace(omega @ x)

    return max(abs(np.vdot(xi, SF.represent(x) @ xi) - state(x)) for x in R.basis)


def nablas(D: StinespringData, beta: np.ndarray, SF: StandardFormData, xi: np.ndarray):
    """``nabla_1 A_1 Omega_1 = pi_s(beta(A_1)) xi`` and ``nabla_2 A_2 Omega_2 = pi_s(sigma(A_2)) xi``."""
    S1, S2 = D.target, D.source
    n1 = np.stack([SF.represent(b) @ xi for b in beta], axis=1) @ S1.vectors_inv
    n2 = np.stack([SF.represent(s) @ xi for s in D.sigma], axis=1) @ S2.vectors_inv
    return n1, n2


def isometry_residual(m: np.ndarray) -> float:
    return opnorm(m.conj().T @ m - np.eye(m.shape[1]))


def cce_residual(nabla: np.ndarray, Js: AntilinearOp, Ji: AntilinearOp) -> float:
    """``|| J_s nabla - nabla J_i ||`` as antilinear maps."""
    return opnorm(Js.mat @ np.conj(nabla) - nabla @ Ji.mat)


def cce_check(nablas_: tuple, Js: AntilinearOp, Js_i: tuple, tol: Tolerance = DEFAULT_TOL) -> dict:
    res = {f"CCE-{k + 1}": cce_residual(n, Js, J) for k, (n, J) in enumerate(zip(nablas_, Js_i))}
    res["pass"] = all(v <= tol.residual_pass for v in res.values())
    return res


@dataclass(frozen=True, eq=False)
class ExpectationMap:
    """``E_i(X) = J_i nabla_i* J_s pi_s(X) J_s nabla_i J_i`` on a basis of ``R``."""

    images: np.ndarray
    membership: float
    unital: float
    cp: float
    expectation: float


def gce_map(SF: StandardFormData, nabla: np.ndarray, S: StandardSpace, xi: np.ndarray) -> ExpectationMap:
    R = SF.space.algebra
    nH = nabla.conj().T

    def apply(x):
        return S.J.around(nH @ SF.space.jconj(SF.represent(x)) @ nabla)

    images = np.stack([apply(x) for x in R.basis])
    membership = max(S.rep_algebra.contains(m) for m in images)
    unital = opnorm(apply(np.eye(R.n)) - np.eye(S.dim))
    d, N = R.dim, S.dim
    gram = np.zeros((d * N, d * N), dtype=complex)
    for i, a in enumerate(R.basis):
        for j, b in enumerate(R.basis):
            gram[i * N:(i + 1) * N, j * N:(j + 1) * N] = apply(a.conj().T @ b)
    expect = max(
        abs(np.vdot(S.omega, m @ S.omega) - np.vdot(xi, SF.represent(x) @ xi)) for m, x in zip(images, R.basis)
    )
    return ExpectationMap(images, membership, unital, cp_residual(gram), expect)


def xi_map(D: StinespringData, beta: np.ndarray, SF: StandardFormData, xi: np.ndarray):
    """``Xi (A_2 (x) A_1 Omega_1) = pi_s(sigma(A_2) beta(A_1)) xi`` and its well-definedness residual."""
    S1 = D.target
    coeffs = S1.vectors_inv
    cols = []
    for s in D.sigma:
        for k in range(S1.dim):
            b = np.einsum("j,jmn->mn", coeffs[:, k], beta)
            cols.append(SF.represent(s @ b) @ xi)
    X = np.stack(cols, axis=1)
    return X @ D.pinv, opnorm(X @ D.null_projector)


@dataclass(frozen=True, eq=False)
class GceReport:
    residuals: dict
    cce_pass: bool
    remark1: dict
    certificate: Optional[FactorizationCertificate]
    R_dim: int
    E1: ExpectationMap
    E2: ExpectationMap

    @property
    def ok(self) -> bool:
        return self.certificate is not None and self.certificate.valid


def gce_factorization(phi: StochasticMap, jhat: JHat, tol: Tolerance = DEFAULT_TOL) -> GceReport:
    """Run the conditional-expectation route to a factorization of ``phi``."""
    D = dilate(require_markov(phi, tol), tol)
    S1, S2 = phi.source, phi.target
    beta = beta_images(D, jhat)
    cert = certify(phi, jhat, tol, D=D)
    R = cert.R
    SF = standard_form(R, tol)
    omega = D.omega_phi
    xi = cone_vector(SF, omega, tol)
    n1, n2 = nablas(D, beta, SF, xi)
    cce = cce_check((n1, n2), SF.J, (S1.J, S2.J), tol)
    E1 = gce_map(SF, n1, S1, xi)
    E2 = gce_map(SF, n2, S2, xi)
    VH, LamH = D.V.conj().T, D.Lambda.conj().T
    compress1 = max(opnorm(m - VH @ x @ D.V) for m, x in zip(E1.images, R.basis))
    compress2 = max(opnorm(m - LamH @ x @ D.Lambda) for m, x in zip(E2.images, R.basis))
    Xi, xi_welldef = xi_map(D, beta, SF, xi)
    residuals = {
        "CCE-1": cce["CCE-1"],
        "CCE-2": cce["CCE-2"],
        "xi-state": vector_state_residual(SF, xi, omega),
        "xi-cone": SF.cone_residual(xi),
        "nabla1-isometry": isometry_residual(n1),
        "nabla2-isometry": isometry_residual(n2),
        "E1-membership": E1.membership,
        "E2-membership": E2.membership,
        "E1-unital": E1.unital,
        "E2-unital": E2.unital,
        "E1-cp": E1.cp,
        "E2-cp": E2.cp,
        "E1-expect": E1.expectation,
        "E2-expect": E2.expectation,
        "E1-compression": compress1,
        "E2-compression": compress2,
        "Xi-welldef": xi_welldef,
        "Xi-isometry": isometry_residual(Xi),
        "Xi-V": opnorm(Xi @ D.V - n1),
        "Xi-Lambda": opnorm(Xi @ D.Lambda - n2),
        "Xi-jhat": opnorm(jhat.op.mat @ np.conj(D.V) - Xi.conj().T @ SF.J.mat @ np.conj(Xi) @ np.conj(D.V)),
        "antiunij": jhat_invariants(D, jhat)["antiunij"],
    }
    cce_pass = bool(cce["pass"])
    maps_equal = compress1 <= tol.residual_pass and compress2 <= tol.residual_pass
    remark1 = {
        "cce": cce_pass,
        "compressions": bool(maps_equal),
        "remark1-fwd": (not cce_pass) or bool(maps_equal),
        "remark1-bwd": (not maps_equal) or cce_pass,
    }
    certificate = None
    if cce_pass:
        residuals["separating"] = 0.0 if cyclic_rank(R, omega, tol) == R.dim else 1.0
        adj1 = adj2 = 0.0
        for k, x in enumerate(R.basis):
            for b, p in zip(beta, S1.pi):
                lhs = np.vdot(omega, x @ b @ omega)
                adj1 = max(adj1, abs(lhs - np.vdot(S1.omega, E1.images[k] @ p @ S1.omega)))
            for s, p in zip(D.sigma, S2.pi):
                lhs = np.vdot(omega, x @ s @ omega)
                adj2 = max(adj2, abs(lhs - np.vdot(S2.omega, E2.images[k] @ p @ S2.omega)))
        residuals["prop5-adjoint-1"] = adj1
        residuals["prop5-adjoint-2"] = adj2

        def e1(x):
            return np.einsum("k,kij->ij", R.coefficients(x), E1.images)

        def e2(x):
            return np.einsum("k,kij->ij", R.coefficients(x), E2.images)

        residuals["cor1-sharp"] = max(
            opnorm(e1(s) - img) for s, img in zip(D.sigma, D.channel.represented_images)
        )
        residuals["cor1-phi"] = max(opnorm(e2(b) - img) for b, img in zip(beta, phi.represented_images))
        residuals["E1-inclusion"] = max(opnorm(e1(b) - p) for b, p in zip(beta, S1.pi))
        residuals["E2-inclusion"] = max(opnorm(e2(s) - p) for s, p in zip(D.sigma, S2.pi))
        certificate = cert
    return GceReport(residuals, cce_pass, remark1, certificate, R.dim, E1, E2)
