"""Noncommutative probability spaces, GNS construction and modular data."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra import FiniteAlgebra, commutant, span_distance
from .linalg import (
    DEFAULT_TOL,
    AntilinearOp,
    Tolerance,
    anti_adjoint,
    anti_compose,
    gram_quotient,
    opnorm,
    orthonormalize,
    psd_functions,
    psd_log,
    psd_power,
)


class FaithfulnessError(ValueError):
    pass


class CyclicityError(ValueError):
    pass


class ModularDriftError(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class ProbabilitySpace:
    """An algebra with the faithful state ``a -> Tr(density @ a)``.

    The density must be an element of the algebra itself.
    """

    algebra: FiniteAlgebra
    density: np.ndarray
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        rho = np.asarray(self.density, dtype=complex)
        object.__setattr__(self, "density", rho)
        if rho.shape != (self.algebra.n, self.algebra.n):
            raise ValueError(f"density shape {rho.shape} does not match ambient {self.algebra.n}")
        if opnorm(rho - rho.conj().T) > self.tol.residual_pass:
            raise ValueError("density is not hermitian")
        if abs(np.trace(rho) - 1) > self.tol.residual_pass:
            raise ValueError(f"density has trace {np.trace(rho).real:.6g}, expected 1")
        if self.algebra.contains(rho) > self.tol.residual_pass:
            raise ValueError("density must be an element of the algebra")
        w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
        if w.min() <= self.tol.rank_cut * max(w.max(), 0.0):
            raise FaithfulnessError(f"state is not faithful (smallest density eigenvalue {w.min():.3e})")

    def state(self, x: np.ndarray) -> complex:
        return complex(np.trace(self.density @ x))


@dataclass(frozen=True, eq=False)
class StandardSpace:
    """An algebra in standard form on ``C^dim``.

    ``prob.algebra`` is the algebra the user works with; ``pi`` holds the
    images of its basis on the Hilbert space, ``vectors`` the columns
    ``pi(E_k) @ omega``.
    """

    prob: ProbabilitySpace
    pi: np.ndarray
    omega: np.ndarray
    J: AntilinearOp
    Delta: np.ndarray
    rep_algebra: FiniteAlgebra
    tol: Tolerance = DEFAULT_TOL

    @property
    def algebra(self) -> FiniteAlgebra:
        return self.prob.algebra

    @property
    def dim(self) -> int:
        return self.omega.shape[0]

    @cached_property
    def vectors(self) -> np.ndarray:
        return np.einsum("kij,j->ik", self.pi, self.omega)

    @cached_property
    def vectors_inv(self) -> np.ndarray:
        return np.linalg.inv(self.vectors)

    @cached_property
    def commutant_algebra(self) -> FiniteAlgebra:
        return commutant(self.rep_algebra, self.tol)

    @cached_property
    def log_delta(self) -> np.ndarray:
        return psd_log(self.Delta, self.tol)

    def represent(self, x: np.ndarray) -> np.ndarray:
        """``pi(x)`` for an element ``x`` of the algebra."""
        return np.einsum("k,kij->ij", self.algebra.coefficients(x), self.pi)

    def represent_coeffs(self, c: np.ndarray) -> np.ndarray:
        return np.einsum("k,kij->ij", c, self.pi)

    def vector(self, x: np.ndarray) -> np.ndarray:
        return self.vectors @ self.algebra.coefficients(x)

    def unrepresent(self, t: np.ndarray) -> np.ndarray:
        """Inverse of ``pi`` on ``pi(M)`` (uses that ``omega`` is separating)."""
        return self.algebra.element(self.vectors_inv @ (t @ self.omega))

    def state(self, t: np.ndarray) -> complex:
        """Vector state ``<omega, t omega>`` of an operator on the Hilbert space."""
        return complex(np.vdot(self.omega, t @ self.omega))

    def jconj(self, t: np.ndarray) -> np.ndarray:
        """``J t J`` as a linear matrix."""
        return self.J.around(t)

    @cached_property
    def commutant_space(self) -> "StandardSpace":
        """The standard space ``(pi(M)', omega)`` on the same Hilbert space."""
        return concrete_space(self.commutant_algebra, self.omega, self.tol)


def trace_dual_density(algebra: FiniteAlgebra, omega: np.ndarray) -> np.ndarray:
    """The element ``w`` of ``algebra`` with ``Tr(w x) = <omega, x omega>`` on the algebra."""
    return algebra.project(np.outer(omega, omega.conj()))


def gns(P: ProbabilitySpace, tol: Tolerance = DEFAULT_TOL) -> StandardSpace:
    """GNS representation of ``P`` together with its modular data."""
    A = P.algebra
    b = A.basis
    gram = np.array([[P.state(ei.conj().T @ ej) for ej in b] for ei in b])
    embed, r = gram_quotient(gram, tol)
    if r < A.dim:
        raise FaithfulnessError(f"GNS Gram has rank {r} < algebra dimension {A.dim}")
    inv = np.linalg.inv(embed)
    pi = np.einsum("ij,ajk,kl->ail", embed, A.left_regular, inv)
    omega = embed @ A.identity_coefficients
    return _standardize(P, pi, omega, tol)


def concrete_space(algebra: FiniteAlgebra, omega: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> StandardSpace:
    """Standard space of an algebra already acting on ``C^n`` with a cyclic separating vector."""
    omega = np.asarray(omega, dtype=complex)
    vecs = np.einsum("kij,j->ik", algebra.basis, omega)
    rank = np.linalg.matrix_rank(vecs, tol=tol.rank_cut * max(opnorm(vecs), 1.0))
    if rank < algebra.n:
        raise CyclicityError(f"vector is not cyclic (span dimension {rank} < {algebra.n})")
    if rank < algebra.dim:
        raise FaithfulnessError(f"vector is not separating (rank {rank} < algebra dimension {algebra.dim})")
    rho = trace_dual_density(algebra, omega)
    P = ProbabilitySpace(algebra, 0.5 * (rho + rho.conj().T), tol)
    return _standardize(P, algebra.basis, omega, tol)


def _standardize(P, pi, omega, tol) -> StandardSpace:
    J, Delta = modular_data(pi, omega, tol)
    rep = FiniteAlgebra(orthonormalize(list(pi), tol)) if not _is_orthonormal(pi) else FiniteAlgebra(pi)
    return StandardSpace(P, pi, omega, J, Delta, rep, tol)


def _is_orthonormal(pi) -> bool:
    flat = pi.reshape(pi.shape[0], -1)
    return opnorm(flat.conj() @ flat.T - np.eye(pi.shape[0])) < 1e-12


def tomita_operator(pi: np.ndarray, omega: np.ndarray) -> AntilinearOp:
    """The antilinear map ``pi(a) omega -> pi(a)^H omega``."""
    vecs = np.einsum("kij,j->ik", pi, omega)
    adj = np.einsum("kji,j->ik", pi.conj(), omega)
    return AntilinearOp(adj @ np.conj(np.linalg.inv(vecs)))


def modular_data(pi: np.ndarray, omega: np.ndarray, tol: Tolerance = DEFAULT_TOL):
    """Modular conjugation and modular operator from the polar decomposition of S."""
    vecs = np.einsum("kij,j->ik", pi, omega)
    if vecs.shape[0] != vecs.shape[1] or np.linalg.matrix_rank(vecs) < vecs.shape[0]:
        raise CyclicityError("omega must be cyclic and separating")
    S = tomita_operator(pi, omega)
    Delta = anti_compose(anti_adjoint(S), S)
    Delta = 0.5 * (Delta + Delta.conj().T)
    _, inv_root, rank = psd_functions(Delta, tol)
    if rank < Delta.shape[0]:
        raise CyclicityError("modular operator is singular")
    J = S.after(inv_root)
    return J, Delta


def modular_flow(S: StandardSpace, t: float, x: np.ndarray) -> np.ndarray:
    """``sigma_t(x) = pi^{-1}(Delta^{it} pi(x) Delta^{-it})``."""
    u = psd_power(S.Delta, 1j * t, S.tol)
    moved = u @ S.represent(x) @ u.conj().T
    drift = S.rep_algebra.contains(moved)
    if drift > S.tol.residual_pass * max(1.0, opnorm(moved)):
        raise ModularDriftError(f"modular flow left the algebra (residual {drift:.3e})")
    return S.unrepresent(moved)


def standard_residuals(S: StandardSpace) -> dict:
    """Residuals of the standard-form invariants of ``S``."""
    eye = np.eye(S.dim)
    Jm = S.J
    comm = S.commutant_algebra
    jrep = [S.jconj(x) for x in S.rep_algebra.basis]
    return {
        "j-omega": opnorm(Jm(S.omega) - S.omega),
        "delta-omega": opnorm(S.Delta @ S.omega - S.omega),
        "j-involution": opnorm(anti_compose(Jm, Jm) - eye),
        "j-delta-j": opnorm(Jm.around(S.Delta) - np.linalg.inv(S.Delta)),
        "jmj-commutant": max(comm.contains(x) for x in jrep),
        "commutant-dim": float(abs(comm.dim - S.rep_algebra.dim)),
    }


def double_commutant_residual(S: StandardSpace) -> float:
    """``pi(M)'' = pi(M)``: span distance (inf when dimensions differ)."""
    return span_distance(commutant(S.commutant_algebra, S.tol), S.rep_algebra)


def density_flow_residual(S: StandardSpace, times=(1.0, -0.5, 0.25)) -> float:
    """Modular flow against ``rho^{it} x rho^{-it}`` (valid because the density lies in the algebra)."""
    worst = 0.0
    for t in times:
        r = psd_power(S.prob.density, 1j * t, S.tol)
        for x in S.algebra.basis:
            worst = max(worst, opnorm(modular_flow(S, t, x) - r @ x @ r.conj().T))
    return worst


def modular_residuals(S: StandardSpace) -> dict:
    out = standard_residuals(S)
    out["double-commutant"] = double_commutant_residual(S)
    out["kms"] = kms_residual(S)
    out["modular-density"] = density_flow_residual(S)
    return out


def kms_residual(S: StandardSpace) -> float:
    """KMS boundary identity ``<J D^{1/2} a O, J D^{1/2} b O> = <a^* O, b^* O>`` on basis pairs."""
    root, _, _ = psd_functions(S.Delta, S.tol)
    mapped = [S.J(root @ v) for v in S.vectors.T]
    starred = [p.conj().T @ S.omega for p in S.pi]
    worst = 0.0
    for i in range(len(mapped)):
        for j in range(len(mapped)):
            worst = max(worst, abs(np.vdot(mapped[i], mapped[j]) - np.vdot(starred[i], starred[j])))
    return worst
