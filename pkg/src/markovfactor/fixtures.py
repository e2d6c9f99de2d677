"""Named example spaces and maps used by tests, scripts and the CLI corpus."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import diagonal_algebra, full_algebra
from .channel import StochasticMap, make_map
from .linalg import DEFAULT_TOL, Tolerance
from .space import ProbabilitySpace, StandardSpace, gns

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def full_space(density: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> StandardSpace:
    density = np.asarray(density, dtype=complex)
    return gns(ProbabilitySpace(full_algebra(density.shape[0]), density, tol), tol)


def diagonal_space(p, tol: Tolerance = DEFAULT_TOL) -> StandardSpace:
    p = np.asarray(p, dtype=float)
    return gns(ProbabilitySpace(diagonal_algebra(len(p)), np.diag(p).astype(complex), tol), tol)


def m2_trace(tol: Tolerance = DEFAULT_TOL) -> StandardSpace:
    return full_space(np.eye(2) / 2, tol)


def m2_diag(tol: Tolerance = DEFAULT_TOL) -> StandardSpace:
    return full_space(np.diag([2 / 3, 1 / 3]), tol)


def identity_map(S: StandardSpace, tol: Tolerance = DEFAULT_TOL) -> StochasticMap:
    return make_map(S, S, lambda a: a, tol)


def depolarizing(lam: float, tol: Tolerance = DEFAULT_TOL) -> StochasticMap:
    """``A -> (1 - lam) A + lam tr(A)/2`` on ``(M_2, trace)``."""
    S = m2_trace(tol)
    return make_map(S, S, lambda a: (1 - lam) * a + lam * np.trace(a) / 2 * np.eye(2), tol)


def conjugation(u: np.ndarray, S: StandardSpace, tol: Tolerance = DEFAULT_TOL) -> StochasticMap:
    """``A -> u^H A u``; Markov when ``u`` commutes with the density."""
    u = np.asarray(u, dtype=complex)
    return make_map(S, S, lambda a: u.conj().T @ a @ u, tol)


def hadamard_conjugation(tol: Tolerance = DEFAULT_TOL) -> StochasticMap:
    return conjugation(HADAMARD, m2_trace(tol), tol)


def diagonal_conjugation(tol: Tolerance = DEFAULT_TOL) -> StochasticMap:
    return conjugation(np.diag([1, np.exp(0.7j)]), m2_diag(tol), tol)


def ampliation(tol: Tolerance = DEFAULT_TOL) -> StochasticMap:
    """``A -> A (x) 1`` from ``(M_2, trace)`` into ``(M_4, trace)``."""
    return make_map(m2_trace(tol), full_space(np.eye(4) / 4, tol), lambda a: np.kron(a, np.eye(2)), tol)


def classical_map(T: np.ndarray, p2: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> StochasticMap:
    """``f -> T f`` from ``(C^n1, p1)`` to ``(C^n2, p2)`` with ``p1 = T^T p2``.

    ``T`` is row-stochastic of shape ``(n2, n1)``.
    """
    T = np.asarray(T, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    p1 = T.T @ p2
    S1, S2 = diagonal_space(p1, tol), diagonal_space(p2, tol)
    return make_map(S1, S2, lambda f: np.diag(T @ np.diag(f)), tol)


SYMMETRIC_T = np.array([[0.75, 0.25], [0.25, 0.75]])


def symmetric_chain(tol: Tolerance = DEFAULT_TOL) -> StochasticMap:
    return classical_map(SYMMETRIC_T, [0.5, 0.5], tol)


def permutation_chain(tol: Tolerance = DEFAULT_TOL) -> StochasticMap:
    return classical_map(np.array([[0.0, 1.0], [1.0, 0.0]]), [0.5, 0.5], tol)


def sinkhorn(m: np.ndarray, row: np.ndarray, col: np.ndarray, iters: int = 500) -> np.ndarray:
    """Scale a positive matrix to the given row and column sums."""
    m = np.asarray(m, dtype=float).copy()
    for _ in range(iters):
        m *= (row / m.sum(axis=1))[:, None]
        m *= (col / m.sum(axis=0))[None, :]
    return m


def random_classical(n: int = 3, seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> StochasticMap:
    """Random measure-preserving chain on ``n`` points with a random invariant law."""
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(n) * 2.0)
    coupling = sinkhorn(rng.uniform(0.2, 1.0, (n, n)), p, p)
    T = coupling / p[:, None]
    return classical_map(T / T.sum(axis=1, keepdims=True), p, tol)


def rotation(theta: float) -> np.ndarray:
    return np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]], dtype=complex)


def flip_average(p: float, theta: float, tol: Tolerance = DEFAULT_TOL) -> StochasticMap:
    """``A -> (A + Y A Y)/2`` from ``(M_2, trace)`` to ``(M_2, w diag(p, 1-p) w^H)``, ``Y = w X w^H``.

    Stochastic for every ``p``; not Markov unless ``p = 1/2``.
    """
    w = rotation(theta)
    y = w @ PAULI_X @ w.conj().T
    target = full_space(w @ np.diag([p, 1 - p]) @ w.conj().T, tol)
    return make_map(m2_trace(tol), target, lambda a: (a + y @ a @ y) / 2, tol)


def flip_average_diag(tol: Tolerance = DEFAULT_TOL) -> StochasticMap:
    return flip_average(2 / 3, 0.0, tol)


def centralizer_mixture(rng: np.random.Generator, terms: int = 3, tol: Tolerance = DEFAULT_TOL) -> StochasticMap:
    """Convex mixture of conjugations by unitaries commuting with a degenerate density on ``M_3``.

    Such maps commute with the modular flow, so they are Markov.
    """
    a = rng.uniform(0.15, 0.35)
    S = full_space(np.diag([a, a, 1 - 2 * a]), tol)
    weights = rng.dirichlet(np.ones(terms))
    us = []
    for _ in range(terms):
        z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        q, r = np.linalg.qr(z)
        q = q * (np.diag(r) / np.abs(np.diag(r)))
        u = np.zeros((3, 3), dtype=complex)
        u[:2, :2] = q
        u[2, 2] = np.exp(1j * rng.uniform(0, 2 * np.pi))
        us.append(u)
    return make_map(S, S, lambda x: sum(w * u.conj().T @ x @ u for w, u in zip(weights, us)), tol)


def random_flip_average(rng: np.random.Generator, tol: Tolerance = DEFAULT_TOL) -> StochasticMap:
    return flip_average(rng.uniform(0.6, 0.9), rng.uniform(0, np.pi), tol)


def coupling(T: np.ndarray, p2: np.ndarray) -> np.ndarray:
    """Joint law ``pi[i, j] = p2_i T_ij`` on ``X_2 x X_1``."""
    return np.asarray(p2, dtype=float)[:, None] * np.asarray(T, dtype=float)


@dataclass(frozen=True)
class Fixture:
    name: str
    build: Callable[..., StochasticMap]
    deterministic: bool = False
    abelian: bool = False


FIXTURES = {
    f.name: f
    for f in [
        Fixture("identity-trace", lambda tol=DEFAULT_TOL: identity_map(m2_trace(tol), tol), deterministic=True),
        Fixture("identity-diag", lambda tol=DEFAULT_TOL: identity_map(m2_diag(tol), tol), deterministic=True),
        Fixture("depolarizing-1/4", lambda tol=DEFAULT_TOL: depolarizing(0.25, tol)),
        Fixture("depolarizing-1/2", lambda tol=DEFAULT_TOL: depolarizing(0.5, tol)),
        Fixture("depolarizing-1", lambda tol=DEFAULT_TOL: depolarizing(1.0, tol)),
        Fixture("hadamard", hadamard_conjugation, deterministic=True),
        Fixture("diagonal-unitary", diagonal_conjugation, deterministic=True),
        Fixture("ampliation", ampliation, deterministic=True),
        Fixture("symmetric-chain", symmetric_chain, abelian=True),
        Fixture("permutation-chain", permutation_chain, deterministic=True, abelian=True),
        Fixture("random-chain", random_classical, abelian=True),
    ]
}

