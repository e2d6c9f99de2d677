"""Stochastic maps between standard probability spaces.

A map is stored through the images of the source algebra's basis, expressed
as elements of the target algebra. Non-Markov (and even non-stochastic) maps
are ordinary values: their flags say what failed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .algebra import FiniteAlgebra
from .linalg import DEFAULT_TOL, Tolerance, opnorm, psd_power
from .space import ProbabilitySpace, StandardSpace, concrete_space, gns, modular_flow

FLOW_TIMES = (1.0, -1.0, 0.5, -0.5, 1.0 / 3.0)


class NotStochasticError(ValueError):
    pass


class NotMarkovError(ValueError):
    pass


class MarkovConsistencyError(ArithmeticError):
    """The three equivalent Markov conditions disagree beyond tolerance."""


@dataclass(frozen=True)
class Flag:
    value: Optional[bool]
    residual: float

    def __bool__(self):
        return bool(self.value)


@dataclass(frozen=True, eq=False)
class StochasticMap:
    source: StandardSpace
    target: StandardSpace
    images: np.ndarray
    unital: Flag
    cp: Flag
    state_preserving: Flag
    tol: Tolerance = DEFAULT_TOL
    normal: bool = field(default=True, init=False)  # automatic in finite dimension

    @property
    def stochastic(self) -> bool:
        return bool(self.unital and self.cp and self.state_preserving)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Coefficients of ``Phi(E_i)`` in the target basis, one column per ``i``."""
        return np.stack([self.target.algebra.coefficients(x) for x in self.images], axis=1)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.einsum("k,kij->ij", self.source.algebra.coefficients(x), self.images)

    def represented(self, x: np.ndarray) -> np.ndarray:
        """``pi_2(Phi(x))``."""
        return self.target.represent(self(x))

    @cached_property
    def represented_images(self) -> np.ndarray:
        return np.stack([self.target.represent(x) for x in self.images])

    @cached_property
    def choi_gram(self) -> np.ndarray:
        """Block matrix ``[pi_2(Phi(E_i^H E_j))]_{ij}``; PSD iff the map is CP."""
        b = self.source.algebra.basis
        d, N = len(b), self.target.dim
        gram = np.zeros((d * N, d * N), dtype=complex)
        for i in range(d):
            for j in range(d):
                gram[i * N:(i + 1) * N, j * N:(j + 1) * N] = self.represented(b[i].conj().T @ b[j])
        return gram

    @cached_property
    def markov(self) -> Flag:
        report = markov_check(self, self.tol)
        return report.cond_adjoint

    @cached_property
    def multiplicativity_residual(self) -> float:
        b = self.source.algebra.basis
        worst = 0.0
        for x in b:
            for y in b:
                worst = max(worst, opnorm(self(x @ y) - self(x) @ self(y)))
        for x in b:
            worst = max(worst, opnorm(self(x.conj().T) - self(x).conj().T))
        return worst

    @property
    def deterministic(self) -> bool:
        return self.multiplicativity_residual <= self.tol.residual_pass


def cp_residual(gram: np.ndarray) -> float:
    herm = opnorm(gram - gram.conj().T)
    w = np.linalg.eigvalsh(0.5 * (gram + gram.conj().T))
    return max(herm, max(0.0, -float(w.min())))


def make_map(source: StandardSpace, target: StandardSpace, action, tol: Tolerance = DEFAULT_TOL) -> StochasticMap:
    """Build a map from images of the source basis (array) or from a callable.

    Flags are computed but never enforced: non-examples are legitimate values.
    """
    basis = source.algebra.basis
    if callable(action):
        images = np.stack([np.asarray(action(b), dtype=complex) for b in basis])
    else:
        images = np.asarray(action, dtype=complex)
    n2 = target.algebra.n
    if images.shape != (len(basis), n2, n2):
        raise ValueError(f"expected images of shape {(len(basis), n2, n2)}, got {images.shape}")
    drift = max(target.algebra.contains(x) for x in images)
    if drift > tol.residual_pass * max(1.0, max(opnorm(x) for x in images)):
        raise ValueError(f"map leaves the target algebra (residual {drift:.3e})")
    images = np.stack([target.algebra.project(x) for x in images])

    def apply(x):
        return np.einsum("k,kij->ij", source.algebra.coefficients(x), images)

    unital = opnorm(apply(np.eye(source.algebra.n)) - np.eye(n2))
    sp = max(abs(target.prob.state(apply(b)) - source.prob.state(b)) for b in basis)
    phi = StochasticMap(
        source, target, images,
        Flag(unital <= tol.residual_pass, unital),
        Flag(None, float("nan")),
        Flag(sp <= tol.residual_pass, sp),
        tol,
    )
    cp = cp_residual(phi.choi_gram)
    object.__setattr__(phi, "cp", Flag(cp <= tol.residual_pass, cp))
    return phi


def map_from_kraus(source: StandardSpace, target: StandardSpace, kraus: Sequence[np.ndarray], tol: Tolerance = DEFAULT_TOL) -> StochasticMap:
    """Heisenberg-picture map ``A -> sum_k K_k^H A K_k``."""
    kraus = [np.asarray(k, dtype=complex) for k in kraus]
    return make_map(source, target, lambda a: sum(k.conj().T @ a @ k for k in kraus), tol)


def compose(second: StochasticMap, first: StochasticMap) -> StochasticMap:
    """``second o first``."""
    if first.target is not second.source:
        raise ValueError("maps are not composable")
    return make_map(first.source, second.target, np.stack([second(x) for x in first.images]), first.tol)


def _require_stochastic(phi: StochasticMap):
    if not phi.stochastic:
        raise NotStochasticError(
            f"map is not stochastic (unital {phi.unital.residual:.2e}, cp {phi.cp.residual:.2e}, "
            f"state {phi.state_preserving.residual:.2e})"
        )


def contraction_u(phi: StochasticMap) -> np.ndarray:
    """The contraction ``U: pi_1(A) O_1 -> pi_2(Phi(A)) O_2``."""
    _require_stochastic(phi)
    out = np.einsum("kij,j->ik", phi.represented_images, phi.target.omega)
    return out @ phi.source.vectors_inv


@dataclass(frozen=True)
class AdjointReport:
    sharp: StochasticMap
    valid: bool
    residual: float


def adjoint_sharp(phi: StochasticMap, tol: Tolerance = DEFAULT_TOL) -> AdjointReport:
    """Solve ``phi_2(B Phi(A)) = phi_1(Phi#(B) A)`` for the candidate ``Phi#``."""
    _require_stochastic(phi)
    E = phi.source.algebra.basis
    F = phi.target.algebra.basis
    st1 = phi.source.prob.state
    st2 = phi.target.prob.state
    # pairing[i, l] = phi_1(E_i E_l); nondegenerate because phi_1 is faithful
    pairing = np.array([[st1(ei @ el) for el in E] for ei in E])
    if np.linalg.cond(pairing) > 1.0 / tol.rank_cut:
        raise ArithmeticError("state pairing is singular; state not faithful?")
    rhs = np.array([[st2(fk @ img) for img in phi.images] for fk in F])
    coeffs = np.linalg.solve(pairing.T, rhs.T)  # column k: Phi#(F_k)
    images = np.einsum("ik,imn->kmn", coeffs, E)
    sharp = make_map(phi.target, phi.source, images, tol)
    res = max(sharp.cp.residual, sharp.unital.residual, sharp.state_preserving.residual)
    return AdjointReport(sharp, bool(sharp.stochastic), res)


@dataclass(frozen=True)
class MarkovReport:
    cond_adjoint: Flag
    cond_modular: Flag
    cond_J: Flag

    @property
    def consistent(self) -> bool:
        return self.cond_adjoint.value == self.cond_modular.value == self.cond_J.value

    @property
    def markov(self) -> bool:
        return bool(self.cond_adjoint.value and self.consistent)

    def residuals(self) -> dict:
        return {
            "prop1-i": self.cond_adjoint.residual,
            "prop1-ii": self.cond_modular.residual,
            "prop1-iii": self.cond_J.residual,
        }


def modular_commutation_residual(phi: StochasticMap, times: Sequence[float] = FLOW_TIMES) -> float:
    """How far ``Phi`` is from intertwining the two modular groups.

    Exact part: the generators ``[log Delta, .]`` are intertwined. Sampled
    part: ``Phi o sigma_t = sigma_t o Phi`` at a few times.
    """
    S1, S2 = phi.source, phi.target
    E = S1.algebra.basis
    worst = 0.0
    for e, img in zip(E, phi.represented_images):
        gen1 = S1.log_delta @ S1.represent(e) - S1.represent(e) @ S1.log_delta
        lhs = phi.represented(S1.unrepresent(gen1))
        rhs = S2.log_delta @ img - img @ S2.log_delta
        worst = max(worst, opnorm(lhs - rhs))
    for t in times:
        u2 = psd_power(S2.Delta, 1j * t, S2.tol)
        for e, img in zip(E, phi.represented_images):
            lhs = phi.represented(modular_flow(S1, t, e))
            worst = max(worst, opnorm(lhs - u2 @ img @ u2.conj().T))
    return worst


def markov_check(phi: StochasticMap, tol: Tolerance = DEFAULT_TOL, strict: bool = True) -> MarkovReport:
    """Evaluate the three equivalent characterizations of a Markov map."""
    _require_stochastic(phi)
    adj = adjoint_sharp(phi, tol)
    mod = modular_commutation_residual(phi)
    U = contraction_u(phi)
    j1, j2 = phi.source.J.mat, phi.target.J.mat
    jres = opnorm(j2 @ np.conj(U) - U @ j1)
    report = MarkovReport(
        Flag(adj.valid, adj.residual),
        Flag(mod <= tol.residual_pass, mod),
        Flag(jres <= tol.residual_pass, jres),
    )
    if strict and not report.consistent:
        raise MarkovConsistencyError(f"Markov conditions disagree: {report.residuals()}")
    return report


def require_markov(phi: StochasticMap, tol: Tolerance = DEFAULT_TOL) -> StochasticMap:
    """Return the adjoint ``Phi#`` or raise if ``phi`` is not Markov."""
    report = markov_check(phi, tol)
    if not report.markov:
        raise NotMarkovError(f"map is not Markov: {report.residuals()}")
    return adjoint_sharp(phi, tol).sharp


def dual_prime(phi: StochasticMap, tol: Tolerance = DEFAULT_TOL) -> StochasticMap:
    """``Phi'(Y) = J_1 Phi#(J_2 Y J_2) J_1`` from ``(M_2', O_2)`` to ``(M_1', O_1)``."""
    sharp = require_markov(phi, tol)
    S1, S2 = phi.source, phi.target
    C2, C1 = S2.commutant_space, S1.commutant_space
    images = []
    for y in C2.algebra.basis:
        x = S2.unrepresent(S2.jconj(y))
        images.append(S1.jconj(S1.represent(sharp(x))))
    return make_map(C2, C1, np.stack(images), tol)


def dual_pairing_residual(phi: StochasticMap, prime: StochasticMap) -> float:
    """``<A O_1, Phi'(Y) O_1> = <Phi(A) O_2, Y O_2>`` on basis grids."""
    S1, S2 = phi.source, phi.target
    worst = 0.0
    for a, img in zip(S1.algebra.basis, phi.represented_images):
        for y, yimg in zip(prime.source.algebra.basis, prime.images):
            lhs = np.vdot(S1.represent(a) @ S1.omega, yimg @ S1.omega)
            rhs = np.vdot(img @ S2.omega, y @ S2.omega)
            worst = max(worst, abs(lhs - rhs))
    return worst


def adjoint_duality_residual(phi: StochasticMap, sharp: StochasticMap) -> float:
    """``phi_2(B Phi(A)) - phi_1(Phi#(B) A)`` over basis grids."""
    st1, st2 = phi.source.prob.state, phi.target.prob.state
    worst = 0.0
    for a, pa in zip(phi.source.algebra.basis, phi.images):
        for b, sb in zip(phi.target.algebra.basis, sharp.images):
            worst = max(worst, abs(st2(b @ pa) - st1(sb @ a)))
    return worst


@dataclass(frozen=True)
class TensorStateFactorization:
    space: StandardSpace
    tensor: StandardSpace
    alpha: StochasticMap
    beta: StochasticMap
    alpha_sharp: StochasticMap
    beta_sharp: StochasticMap
    residuals: dict


def tensor_state_factorization(P: ProbabilitySpace, tol: Tolerance = DEFAULT_TOL) -> TensorStateFactorization:
    """Factor the state of ``P`` through ``pi(M) (x) pi(M)`` with ``alpha = pi (x) 1``, ``beta = 1 (x) pi``."""
    S = gns(P, tol)
    N = S.dim
    eye = np.eye(N)
    rep = S.rep_algebra.basis
    prod = np.stack([np.kron(a, b) for a in rep for b in rep])
    T = concrete_space(FiniteAlgebra(prod), np.kron(S.omega, S.omega), tol)
    alpha = make_map(S, T, np.stack([np.kron(p, eye) for p in S.pi]), tol)
    beta = make_map(S, T, np.stack([np.kron(eye, p) for p in S.pi]), tol)
    a_sharp = adjoint_sharp(alpha, tol).sharp
    b_sharp = adjoint_sharp(beta, tol).sharp
    res_a = res_b = 0.0
    for a in rep:
        for b in rep:
            ab = np.kron(a, b)
            res_a = max(res_a, opnorm(S.represent(a_sharp(ab)) - S.state(b) * a))
            res_b = max(res_b, opnorm(S.represent(b_sharp(ab)) - S.state(a) * b))
    res_ba = res_ab = 0.0
    for e in P.algebra.basis:
        target = P.state(e) * np.eye(P.algebra.n)
        res_ba = max(res_ba, opnorm(b_sharp(alpha(e)) - target))
        res_ab = max(res_ab, opnorm(a_sharp(beta(e)) - target))
    residuals = {
        "alpha-sharp-tensor": res_a,
        "beta-sharp-tensor": res_b,
        "beta-sharp-alpha": res_ba,
        "alpha-sharp-beta": res_ab,
    }
    return TensorStateFactorization(S, T, alpha, beta, a_sharp, b_sharp, residuals)
