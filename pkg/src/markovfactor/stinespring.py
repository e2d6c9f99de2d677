"""Stinespring quotient spaces of stochastic maps.

For ``Phi: (M_1, phi_1) -> (M_2, phi_2)`` the space ``L`` is the quotient of
``M_1 (x) h_2`` by the null vectors of ``<A (x) h, X (x) k> = <h, Phi(A^H X) k>``.
Spanning vectors are ``E_i (x) f_k`` (``E_i`` the source basis, ``f_k`` the
standard basis of ``h_2``) in kron order, source index outer.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra import commutation_residual
from .channel import StochasticMap, contraction_u, dual_prime, markov_check, require_markov
from .linalg import DEFAULT_TOL, AntilinearOp, Tolerance, antiunitarity_residual, gram_quotient, opnorm, right_inverse


@dataclass(frozen=True, eq=False)
class StinespringData:
    channel: StochasticMap
    embed: np.ndarray
    pinv: np.ndarray
    sigma: np.ndarray
    V: np.ndarray
    Lambda: np.ndarray
    omega_phi: np.ndarray
    welldef_sigma: float
    tol: Tolerance = DEFAULT_TOL

    @property
    def L_dim(self) -> int:
        return self.embed.shape[0]

    @property
    def source(self):
        return self.channel.source

    @property
    def target(self):
        return self.channel.target

    @cached_property
    def null_projector(self) -> np.ndarray:
        m = self.embed.shape[1]
        return np.eye(m) - self.pinv @ self.embed

    def sigma_of(self, x: np.ndarray) -> np.ndarray:
        """``sigma(x)`` for an element of the source algebra."""
        return np.einsum("k,kij->ij", self.source.algebra.coefficients(x), self.sigma)

    def span_vector(self, coeffs: np.ndarray, h: np.ndarray) -> np.ndarray:
        """The class of ``(sum_i coeffs_i E_i) (x) h`` in ``L``."""
        return self.embed @ np.kron(coeffs, h)

    def lift(self, block: np.ndarray) -> np.ndarray:
        """Push an operator on spanning coordinates down to ``L``."""
        return self.embed @ block @ self.pinv

    def welldef_residual(self, block: np.ndarray) -> float:
        """How far ``block`` is from preserving the null space of the Gram form."""
        return opnorm(self.embed @ block @ self.null_projector)

    @cached_property
    def tau(self) -> np.ndarray:
        """``tau`` on the basis of the target commutant."""
        return np.stack([self._tau_block(y) for y in self.target.commutant_algebra.basis])

    def _tau_block(self, y: np.ndarray) -> np.ndarray:
        return self.lift(np.kron(np.eye(self.source.algebra.dim), y))

    @cached_property
    def welldef_tau(self) -> float:
        eye = np.eye(self.source.algebra.dim)
        return max(self.welldef_residual(np.kron(eye, y)) for y in self.target.commutant_algebra.basis)


class CommutantError(ValueError):
    pass


def dilate(phi: StochasticMap, tol: Tolerance = DEFAULT_TOL) -> StinespringData:
    """Build the quotient space ``L`` together with ``sigma``, ``V`` and ``Lambda``."""
    if not phi.cp:
        raise ValueError(f"map is not completely positive (residual {phi.cp.residual:.3e})")
    S1, S2 = phi.source, phi.target
    embed, _ = gram_quotient(phi.choi_gram, tol)
    pinv = right_inverse(embed)
    null = np.eye(embed.shape[1]) - pinv @ embed
    eye2 = np.eye(S2.dim)
    blocks = [np.kron(L, eye2) for L in S1.algebra.left_regular]
    sigma = np.stack([embed @ b @ pinv for b in blocks])
    welldef = max(opnorm(embed @ b @ null) for b in blocks)
    c1 = S1.algebra.identity_coefficients
    V = embed @ np.kron(c1[:, None], eye2)
    Lam = embed @ np.kron(S1.vectors_inv, S2.omega[:, None])
    omega_phi = embed @ np.kron(c1, S2.omega)
    return StinespringData(phi, embed, pinv, sigma, V, Lam, omega_phi, welldef, tol)


def tau_of(D: StinespringData, y: np.ndarray) -> np.ndarray:
    """``tau(Y)``, defined for ``Y`` in the commutant of the target algebra."""
    y = np.asarray(y, dtype=complex)
    comm = D.target.commutant_algebra
    if comm.contains(y) > D.tol.residual_pass * max(1.0, opnorm(y)):
        raise CommutantError(f"operator is not in the target commutant (residual {comm.contains(y):.3e})")
    return D._tau_block(y)


def verify_relations(D: StinespringData, tol: Tolerance = DEFAULT_TOL) -> dict:
    """Residual of every structural relation of the dilation, keyed by relation name."""
    phi = D.channel
    S1, S2 = D.source, D.target
    E = S1.algebra.basis
    sig, tau, V, Lam = D.sigma, D.tau, D.V, D.Lambda
    LamH, VH = Lam.conj().T, V.conj().T
    out = {}
    out["st1"] = max(opnorm(LamH @ s @ Lam - p) for s, p in zip(sig, S1.pi))
    out["st2"] = commutation_residual([Lam @ LamH], sig)
    out["stdual"] = commutation_residual(sig, tau)
    out["v-tau-v"] = max(opnorm(VH @ t @ V - y) for t, y in zip(tau, S2.commutant_algebra.basis))
    out["vv-commutant"] = commutation_residual([V @ VH], tau)
    out["u-factor"] = opnorm(contraction_u(phi) - VH @ Lam) if phi.stochastic else float("nan")
    out["reconstruct"] = max(opnorm(VH @ s @ V - img) for s, img in zip(sig, phi.represented_images))
    mult = 0.0
    for a, ea in enumerate(E):
        for b, eb in enumerate(E):
            mult = max(mult, opnorm(sig[a] @ sig[b] - D.sigma_of(ea @ eb)))
    star = max(opnorm(D.sigma_of(e.conj().T) - s.conj().T) for e, s in zip(E, sig))
    out["sigma-hom"] = max(mult, star)
    comm = S2.commutant_algebra
    tmult = 0.0
    for a, ya in enumerate(comm.basis):
        for b, yb in enumerate(comm.basis):
            prod = np.einsum("k,kij->ij", comm.coefficients(ya @ yb), tau)
            tmult = max(tmult, opnorm(tau[a] @ tau[b] - prod))
    out["tau-hom"] = tmult
    out["isometry-V"] = opnorm(VH @ V - np.eye(S2.dim))
    out["isometry-Lambda"] = opnorm(LamH @ Lam - np.eye(S1.dim))
    # <Omega_2, V* T V Omega_2> and <Omega_1, Lambda* T Lambda Omega_1> against <Omega_phi, T Omega_phi>
    probes = [s @ t for s in sig for t in tau]
    expect = 0.0
    for T in probes:
        ref = np.vdot(D.omega_phi, T @ D.omega_phi)
        expect = max(expect, abs(np.vdot(S2.omega, VH @ T @ V @ S2.omega) - ref))
        expect = max(expect, abs(np.vdot(S1.omega, LamH @ T @ Lam @ S1.omega) - ref))
    out["expect"] = expect
    out["dilation-welldef"] = max(D.welldef_sigma, D.welldef_tau)
    report = markov_check(phi, tol, strict=False) if phi.stochastic else None
    if report is not None and report.markov:
        prime = dual_prime(phi, tol)
        out["st5"] = max(opnorm(LamH @ t @ Lam - img) for t, img in zip(tau, prime.images))
    else:
        out["st5"] = None
    return out


@dataclass(frozen=True, eq=False)
class WData:
    """The anti-unitary ``W: L_sharp -> L_prime`` and both dilations."""

    W: AntilinearOp
    sharp: StinespringData
    prime: StinespringData
    residuals: dict


def w_antiunitary(phi: StochasticMap, tol: Tolerance = DEFAULT_TOL) -> WData:
    """``W (X (x) h) = J_2 X J_2 (x) J_1 h`` from the dilation of ``Phi#`` to that of ``Phi'``."""
    sharp_map = require_markov(phi, tol)
    prime_map = dual_prime(phi, tol)
    Ds = dilate(sharp_map, tol)
    Dp = dilate(prime_map, tol)
    S1, S2 = phi.source, phi.target
    comm2 = prime_map.source.algebra
    # a[:, i]: coefficients of J_2 pi_2(F_i) J_2 in the commutant basis
    a = np.stack([comm2.coefficients(S2.jconj(p)) for p in S2.pi], axis=1)
    wc = np.kron(a, S1.J.mat)
    W = AntilinearOp(Dp.embed @ wc @ np.conj(Ds.pinv))
    welldef = opnorm(Dp.embed @ wc @ np.conj(Ds.null_projector))
    conj_tau = 0.0
    # the commutant of the target of Phi' is pi_1(M_1) itself
    for p in S1.rep_algebra.basis:
        conj_tau = max(conj_tau, opnorm(W.conjugate(tau_of(Dp, p)) - tau_of(Ds, S1.jconj(p))))
    conj_sigma = 0.0
    for y, s in zip(comm2.basis, Dp.sigma):
        conj_sigma = max(conj_sigma, opnorm(W.conjugate(s) - Ds.sigma_of(S2.unrepresent(S2.jconj(y)))))
    residuals = {
        "w-antiunitary": antiunitarity_residual(W) if Ds.L_dim == Dp.L_dim else float("inf"),
        "w-welldef": welldef,
        "w-tau": conj_tau,
        "w-sigma": conj_sigma,
    }
    return WData(W, Ds, Dp, residuals)

