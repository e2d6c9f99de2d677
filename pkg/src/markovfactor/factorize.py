"""Factorization certificates ``Phi = alpha# o beta`` through a common probability space.

Everything lives on the Stinespring space ``L`` of the adjoint ``Phi#``. The
first homomorphism is always ``alpha = sigma`` (of ``Phi#``); the second is
``beta(A) = Jhat* tau(J_1 A J_1) Jhat`` for an anti-unitary ``Jhat`` on ``L``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .algebra import FiniteAlgebra, commutant, commutation_residual, generate, is_abelian, join, span_distance
from .channel import StochasticMap, adjoint_sharp, contraction_u, make_map, markov_check, require_markov
from .linalg import (
    DEFAULT_TOL,
    AntilinearOp,
    Tolerance,
    anti_compose,
    antiunitarity_residual,
    opnorm,
)
from .space import StandardSpace, concrete_space
from .stinespring import StinespringData, dilate, tau_of, w_antiunitary

PROVENANCES = ("deterministic-canonical", "abelian-W", "user-supplied")


class JHatError(ValueError):
    """The supplied operator is not anti-unitary on ``L``."""


class NotDeterministicError(ValueError):
    pass


class NotAbelianError(ValueError):
    pass


class CertificateConsistencyError(ArithmeticError):
    pass


@dataclass(frozen=True)
class JHat:
    op: AntilinearOp
    provenance: str
    residuals: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")


def antiunij_residual(D: StinespringData, jhat: JHat) -> float:
    """``|| Jhat V - V J_1 ||`` with ``V`` the isometry of the dilation of ``Phi#``."""
    j1 = D.target.J.mat
    return opnorm(jhat.op.mat @ np.conj(D.V) - D.V @ j1)


def jhat_invariants(D: StinespringData, jhat: JHat) -> dict:
    eye = np.eye(D.L_dim)
    return {
        "jhat-antiunitary": antiunitarity_residual(jhat.op),
        "antiunij": antiunij_residual(D, jhat),
        "jhat-involution": opnorm(anti_compose(jhat.op, jhat.op) - eye),
    }


def beta_images(D: StinespringData, jhat: JHat) -> np.ndarray:
    """``beta(E_i) = Jhat* tau(J_1 pi_1(E_i) J_1) Jhat`` on the basis of ``M_1``."""
    S1 = D.target
    return np.stack([jhat.op.conjugate(tau_of(D, S1.jconj(p))) for p in S1.pi])


def build_R(D: StinespringData, jhat: JHat, tol: Tolerance = DEFAULT_TOL) -> FiniteAlgebra:
    """The algebra generated by ``sigma(M_2)`` and ``beta(M_1)``."""
    return generate(D.L_dim, list(D.sigma) + list(beta_images(D, jhat)), tol)


def cyclic_rank(R: FiniteAlgebra, omega: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> int:
    vecs = np.einsum("kij,j->ik", R.basis, omega)
    return int(np.linalg.matrix_rank(vecs, tol=tol.rank_cut * max(opnorm(vecs), 1.0)))


@dataclass(frozen=True, eq=False)
class FactorizationCertificate:
    """Outcome of a factorization attempt; ``valid`` is the only verdict."""

    channel: StochasticMap
    dilation: StinespringData
    R: FiniteAlgebra
    alpha_images: np.ndarray
    beta_images: np.ndarray
    cond1_residuals: tuple
    omega_separating: bool
    omega_cyclic: bool
    reconstruction_residual: float
    reconstruction_sharp_residual: float
    residuals: dict
    valid: bool
    provenance: str
    jhat: Optional[JHat] = None
    tol: Tolerance = DEFAULT_TOL

    @property
    def minimal(self) -> bool:
        return minimality_check(self)

    @property
    def omega(self) -> np.ndarray:
        return self.dilation.omega_phi

    def moment(self, f: np.ndarray, g: np.ndarray) -> complex:
        """``omega(alpha(f) beta(g))`` for ``f`` in ``M_2`` and ``g`` in ``M_1``."""
        D = self.dilation
        a = np.einsum("k,kij->ij", D.source.algebra.coefficients(f), self.alpha_images)
        b = np.einsum("k,kij->ij", D.target.algebra.coefficients(g), self.beta_images)
        return complex(np.vdot(self.omega, a @ b @ self.omega))

    def as_maps(self) -> tuple[StandardSpace, StochasticMap, StochasticMap]:
        """The space ``(R, omega)`` with ``alpha`` and ``beta`` as maps into it."""
        if not (self.omega_cyclic and self.omega_separating):
            raise ValueError("omega is not cyclic and separating for R")
        SR = concrete_space(self.R, self.omega, self.tol)
        D = self.dilation
        alpha = make_map(D.source, SR, self.alpha_images, self.tol)
        beta = make_map(D.target, SR, self.beta_images, self.tol)
        return SR, alpha, beta

    def map_residuals(self) -> dict:
        """Both legs deterministic and Markov, and their adjoints given by ``Lambda*`` and ``V*``."""
        SR, alpha, beta = self.as_maps()
        D = self.dilation
        out = {
            "alpha-hom": alpha.multiplicativity_residual,
            "beta-hom": beta.multiplicativity_residual,
            "alpha-state": alpha.state_preserving.residual,
            "beta-state": beta.state_preserving.residual,
        }
        for name, m in (("alpha", alpha), ("beta", beta)):
            rep = markov_check(m, self.tol, strict=False)
            out[f"{name}-markov"] = max(rep.residuals().values())
            out[f"{name}-consistent"] = 0.0 if rep.consistent else 1.0
        a_sharp = adjoint_sharp(alpha, self.tol).sharp
        b_sharp = adjoint_sharp(beta, self.tol).sharp
        LamH, VH = D.Lambda.conj().T, D.V.conj().T
        out["alpha-sharp-formula"] = max(
            opnorm(D.source.represent(a_sharp(t)) - LamH @ t @ D.Lambda) for t in SR.algebra.basis
        )
        out["beta-sharp-formula"] = max(
            opnorm(D.target.represent(b_sharp(t)) - VH @ t @ D.V) for t in SR.algebra.basis
        )
        return out


def _assemble(phi, D, R, alpha_imgs, beta_imgs, provenance, tol, jhat=None, extra=None) -> FactorizationCertificate:
    S1, S2 = phi.source, phi.target
    VH, LamH = D.V.conj().T, D.Lambda.conj().T
    cond1a = max(S1.rep_algebra.contains(VH @ t @ D.V) for t in R.basis)
    cond1b = max(S2.rep_algebra.contains(LamH @ t @ D.Lambda) for t in R.basis)
    rank = cyclic_rank(R, D.omega_phi, tol)
    separating = rank == R.dim
    cyclic = rank == D.L_dim
    recon = max(opnorm(LamH @ b @ D.Lambda - img) for b, img in zip(beta_imgs, phi.represented_images))
    sharp = D.channel  # the dilated map is Phi#
    recon_sharp = max(opnorm(VH @ a @ D.V - img) for a, img in zip(alpha_imgs, sharp.represented_images))
    residuals = {"cond1-a": cond1a, "cond1-b": cond1b, "factor-phi": recon, "factor-sharp": recon_sharp}
    residuals.update(extra or {})
    cond1 = cond1a <= tol.residual_pass and cond1b <= tol.residual_pass
    if cond1 and not separating:
        raise CertificateConsistencyError("cond1 holds but omega is not separating for R")
    valid = (
        cond1
        and separating
        and all(v <= tol.residual_pass for v in residuals.values())
    )
    return FactorizationCertificate(
        phi, D, R, alpha_imgs, beta_imgs, (cond1a, cond1b), separating, cyclic,
        recon, recon_sharp, residuals, bool(valid), provenance, jhat, tol,
    )


def _require_deterministic(phi: StochasticMap, tol: Tolerance):
    if phi.multiplicativity_residual > tol.residual_pass:
        raise NotDeterministicError(f"map is not multiplicative (residual {phi.multiplicativity_residual:.3e})")


def deterministic_factorize(phi: StochasticMap, tol: Tolerance = DEFAULT_TOL) -> FactorizationCertificate:
    """Factor a deterministic Markov map through ``(sigma(M_2), omega)`` with ``beta = sigma o Phi``."""
    _require_deterministic(phi, tol)
    D = dilate(require_markov(phi, tol), tol)
    R = generate(D.L_dim, list(D.sigma), tol)
    beta_imgs = np.stack([D.sigma_of(img) for img in phi.images])
    LamLamH = opnorm(D.Lambda @ D.Lambda.conj().T - np.eye(D.L_dim))
    return _assemble(phi, D, R, D.sigma, beta_imgs, "deterministic-canonical", tol, extra={"lambda-unitary": LamLamH})


def jhat_deterministic(phi: StochasticMap, tol: Tolerance = DEFAULT_TOL) -> JHat:
    """Canonical ``Jhat`` with ``Jhat* (A_2 (x) h) = Lambda J_2 A_2 U h``."""
    _require_deterministic(phi, tol)
    D = dilate(require_markov(phi, tol), tol)
    S1, S2 = phi.source, phi.target
    comm = commutant_of_sigma(D, tol)
    if cyclic_rank(comm, D.omega_phi, tol) < D.L_dim:
        raise ValueError("omega is not cyclic for the commutant of sigma(M_2)")
    U = contraction_u(phi)
    j2 = S2.J.mat
    cols = [D.Lambda @ (j2 @ np.conj(p @ U[:, k])) for p in S2.pi for k in range(S1.dim)]
    Y = np.stack(cols, axis=1)
    star = AntilinearOp(Y @ np.conj(D.pinv))
    op = AntilinearOp(star.mat.T)
    welldef = opnorm(Y @ np.conj(D.null_projector))
    # defining formula on T' omega for T' in sigma(M_2)'
    LamH = D.Lambda.conj().T
    defining = 0.0
    for t in comm.basis:
        x = S2.unrepresent(S2.jconj(LamH @ t @ D.Lambda))
        want = D.span_vector(S2.algebra.coefficients(x), S1.omega)
        defining = max(defining, opnorm(op(t @ D.omega_phi) - want))
    jh = JHat(op, "deterministic-canonical", {"jhat-welldef": welldef, "jhat-defining": defining})
    beta = beta_images(D, jh)
    lands = max(opnorm(b - D.sigma_of(img)) for b, img in zip(beta, phi.images))
    lam = opnorm(op.mat @ np.conj(D.Lambda) - D.Lambda @ j2)
    jh.residuals.update({"jhat-beta-sigma": lands, "jhat-lambda": lam, **jhat_invariants(D, jh)})
    return jh


def commutant_of_sigma(D: StinespringData, tol: Tolerance = DEFAULT_TOL) -> FiniteAlgebra:
    return commutant(generate(D.L_dim, list(D.sigma), tol), tol)


def _maximal_abelian(S: StandardSpace, tol: Tolerance) -> bool:
    return is_abelian(S.rep_algebra, tol) and S.commutant_algebra.dim == S.rep_algebra.dim


def jhat_abelian(phi: StochasticMap, tol: Tolerance = DEFAULT_TOL) -> JHat:
    """``Jhat = W`` read on ``L`` of ``Phi#`` through the identification ``L_prime = L_sharp``."""
    for side, S in (("source", phi.source), ("target", phi.target)):
        if not _maximal_abelian(S, tol):
            raise NotAbelianError(f"{side} algebra is not maximal abelian in its standard space")
    wd = w_antiunitary(phi, tol)
    Ds, Dp = wd.sharp, wd.prime
    S2 = phi.target
    comm2 = Dp.source.algebra
    b = np.stack([comm2.coefficients(p) for p in S2.pi], axis=1)
    ident_c = np.kron(b, np.eye(phi.source.dim))
    ident = Dp.embed @ ident_c @ Ds.pinv
    residuals = {
        "identification-unitary": opnorm(ident.conj().T @ ident - np.eye(Ds.L_dim)),
        "identification-welldef": opnorm(Dp.embed @ ident_c @ Ds.null_projector),
        "identification-sigma": max(
            opnorm(ident @ s @ ident.conj().T - Dp.sigma_of(p)) for s, p in zip(Ds.sigma, S2.pi)
        ),
        # Phi' and Phi# agree once M_i' is identified with pi_i(M_i)
        "sharp-equals-prime": max(
            opnorm(phi.source.represent(sh) - Dp.channel(p)) for sh, p in zip(Ds.channel.images, S2.pi)
        ),
        **wd.residuals,
    }
    op = wd.W.before(ident.conj().T)
    jh = JHat(op, "abelian-W", residuals)
    jh.residuals.update(jhat_invariants(Ds, jh))
    return jh


def certify(phi: StochasticMap, jhat: JHat, tol: Tolerance = DEFAULT_TOL, D: Optional[StinespringData] = None) -> FactorizationCertificate:
    """Check the sufficient conditions for ``Phi = alpha# o beta`` with the given ``Jhat``.

    A failing certificate says nothing about factorizability in general.
    """
    if D is None:
        D = dilate(require_markov(phi, tol), tol)
    if jhat.op.mat.shape != (D.L_dim, D.L_dim):
        raise JHatError(f"Jhat must be {D.L_dim}x{D.L_dim}, got {jhat.op.mat.shape}")
    inv = jhat_invariants(D, jhat)
    if inv["jhat-antiunitary"] > tol.residual_pass:
        raise JHatError(f"Jhat is not anti-unitary (residual {inv['jhat-antiunitary']:.3e})")
    beta = beta_images(D, jhat)
    R = generate(D.L_dim, list(D.sigma) + list(beta), tol)
    return _assemble(phi, D, R, D.sigma, beta, jhat.provenance, tol, jhat, extra={"antiunij": inv["antiunij"]})


@dataclass(frozen=True)
class SufficientReport:
    holds: bool
    jhat_lambda: float
    commute: float


def sufficient_check(
    D: StinespringData,
    jhat: JHat,
    beta: np.ndarray,
    tol: Tolerance = DEFAULT_TOL,
    certificate: Optional[FactorizationCertificate] = None,
) -> SufficientReport:
    """``Jhat Lambda = Lambda J_2`` together with ``sigma(M_2)`` commuting with ``beta(M_1)``.

    Both together imply the two compression conditions; with a certificate
    supplied, that implication is asserted.
    """
    j2 = D.source.J.mat
    lam = opnorm(jhat.op.mat @ np.conj(D.Lambda) - D.Lambda @ j2)
    comm = commutation_residual(D.sigma, beta)
    holds = lam <= tol.residual_pass and comm <= tol.residual_pass
    if holds and certificate is not None and max(certificate.cond1_residuals) > tol.residual_pass:
        raise CertificateConsistencyError(
            f"sufficient conditions hold but compressions fail {certificate.cond1_residuals}"
        )
    return SufficientReport(bool(holds), lam, comm)


def minimality_check(C: FactorizationCertificate) -> bool:
    """``R`` equals the algebra generated by the images of ``alpha`` and ``beta``."""
    if not C.valid:
        raise ValueError("minimality is only defined for a valid certificate")
    n = C.R.n
    gen = join(generate(n, list(C.alpha_images), C.tol), generate(n, list(C.beta_images), C.tol), C.tol)
    return span_distance(gen, C.R) <= C.tol.residual_pass
