"""Concrete finite-dimensional von Neumann algebras inside ``M_n``."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    basis_gram_residual,
    commutation_nullspace,
    commutator,
    matrix_units,
    opnorm,
    orthonormalize,
    subspace_residual,
)


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    """A unital *-subalgebra of ``M_n`` stored as a trace-orthonormal basis."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim != 3 or b.shape[1] != b.shape[2]:
            raise ValueError(f"basis must have shape (d, n, n), got {b.shape}")
        object.__setattr__(self, "basis", b)

    @property
    def n(self) -> int:
        return self.basis.shape[1]

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __len__(self):
        return self.dim

    def coefficients(self, x: np.ndarray) -> np.ndarray:
        return np.einsum("kij,ij->k", self.basis.conj(), np.asarray(x))

    def element(self, coeffs: np.ndarray) -> np.ndarray:
        return np.einsum("k,kij->ij", np.asarray(coeffs), self.basis)

    def project(self, x: np.ndarray) -> np.ndarray:
        return self.element(self.coefficients(x))

    def contains(self, x: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> float:
        """Membership residual of ``x`` (0 means ``x`` lies in the algebra)."""
        return subspace_residual(x, self.basis, tol, check=False)

    @cached_property
    def identity_coefficients(self) -> np.ndarray:
        return self.coefficients(np.eye(self.n))

    @cached_property
    def left_regular(self) -> np.ndarray:
        """``L[a][i, j] = <E_i, E_a E_j>``: left multiplication in basis coordinates."""
        prods = np.einsum("aij,bjk->abik", self.basis, self.basis)
        return np.einsum("iml,abml->aib", self.basis.conj(), prods)

    @cached_property
    def adjoint_matrix(self) -> np.ndarray:
        """``K[i, j] = <E_i, E_j^H>``, so ``coeffs(x^H) = K @ conj(coeffs(x))``."""
        adj = np.conj(np.swapaxes(self.basis, 1, 2))
        return np.einsum("iml,jml->ij", self.basis.conj(), adj)

    def closure_residuals(self, tol: Tolerance = DEFAULT_TOL) -> dict:
        adj = max(self.contains(b.conj().T) for b in self.basis)
        prod = max(self.contains(a @ b) for a in self.basis for b in self.basis)
        return {
            "orthonormal": basis_gram_residual(self.basis),
            "identity": self.contains(np.eye(self.n)),
            "adjoint": adj,
            "product": prod,
        }


def full_algebra(n: int) -> FiniteAlgebra:
    return FiniteAlgebra(matrix_units(n))


def diagonal_algebra(n: int) -> FiniteAlgebra:
    basis = np.zeros((n, n, n), dtype=complex)
    for k in range(n):
        basis[k, k, k] = 1.0
    return FiniteAlgebra(basis)


def trivial_algebra(n: int) -> FiniteAlgebra:
    return FiniteAlgebra(np.eye(n)[None] / np.sqrt(n))


def generate(n: int, gens: Sequence[np.ndarray], tol: Tolerance = DEFAULT_TOL) -> FiniteAlgebra:
    """Smallest unital *-algebra containing ``gens``.

    Starts from the identity and closes under right multiplication by the
    generators and their adjoints until the span stops growing.
    """
    gens = [np.asarray(g, dtype=complex) for g in gens]
    if any(g.shape != (n, n) for g in gens):
        raise ValueError(f"generators must be {n}x{n}")
    letters = gens + [g.conj().T for g in gens]
    if letters:
        letters = list(orthonormalize(letters, tol))
    basis = orthonormalize([np.eye(n)] + letters, tol)
    for _ in range(n * n):
        if not letters:
            break
        words = list(basis) + [b @ g for b in basis for g in letters]
        grown = orthonormalize(words, tol)
        if grown.shape[0] == basis.shape[0]:
            break
        basis = grown
    return FiniteAlgebra(basis)


def commutant(a: FiniteAlgebra, tol: Tolerance = DEFAULT_TOL) -> FiniteAlgebra:
    return FiniteAlgebra(commutation_nullspace(list(a.basis), tol, n=a.n))


def join(a: FiniteAlgebra, b: FiniteAlgebra, tol: Tolerance = DEFAULT_TOL) -> FiniteAlgebra:
    if a.n != b.n:
        raise ValueError(f"ambient dimensions differ: {a.n} vs {b.n}")
    return generate(a.n, list(a.basis) + list(b.basis), tol)


def is_abelian(a: FiniteAlgebra, tol: Tolerance = DEFAULT_TOL) -> bool:
    return commutation_residual(a.basis, a.basis) <= tol.residual_pass


def commutation_residual(xs: Sequence[np.ndarray], ys: Sequence[np.ndarray]) -> float:
    return max((opnorm(commutator(x, y)) for x in xs for y in ys), default=0.0)


def contains(a: FiniteAlgebra, x: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> float:
    return a.contains(x, tol)


def inclusion_residual(small: FiniteAlgebra | Sequence[np.ndarray], big: FiniteAlgebra) -> float:
    mats = small.basis if isinstance(small, FiniteAlgebra) else small
    return max((big.contains(x) for x in mats), default=0.0)


def span_distance(a: FiniteAlgebra, b: FiniteAlgebra) -> float:
    """Symmetric membership residual; ``inf`` when dimensions differ."""
    if a.n != b.n or a.dim != b.dim:
        return float("inf")
    return max(inclusion_residual(a, b), inclusion_residual(b, a))


def same_span(a: FiniteAlgebra, b: FiniteAlgebra, tol: Tolerance = DEFAULT_TOL) -> bool:
    return span_distance(a, b) <= tol.residual_pass
