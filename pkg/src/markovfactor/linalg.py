"""Dense complex matrix helpers shared by every other module.

Antilinear operators use one fixed convention throughout the package: an
``AntilinearOp`` with matrix ``M`` sends a vector ``v`` to ``M @ conj(v)``.
All residuals are spectral (operator) norms.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


class NotHermitianError(ValueError):
    pass


class NotPSDError(ValueError):
    pass


@dataclass(frozen=True)
class Tolerance:
    """Numerical cuts used across the package.

    Attributes:
        rank_cut: relative eigenvalue threshold below which an eigenvalue
            counts as zero (relative to the largest one).
        residual_pass: largest operator-norm residual accepted as "holds".
    """

    rank_cut: float = 1e-9
    residual_pass: float = 1e-8

    def __post_init__(self):
        if not (0 < self.rank_cut < 1):
            raise ValueError(f"rank_cut must lie in (0, 1), got {self.rank_cut}")
        if not self.residual_pass > 0:
            raise ValueError(f"residual_pass must be positive, got {self.residual_pass}")

    def passes(self, residual: float) -> bool:
        return bool(residual <= self.residual_pass)


DEFAULT_TOL = Tolerance()


def opnorm(x: np.ndarray) -> float:
    """Spectral norm; 0 for empty arrays."""
    x = np.asarray(x)
    if x.size == 0:
        return 0.0
    if x.ndim == 1:
        return float(np.linalg.norm(x))
    return float(np.linalg.norm(x, 2))


def dagger(x: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(x, -1, -2))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Trace inner product Tr(a^H b)."""
    return complex(np.vdot(a, b))


@dataclass(frozen=True)
class AntilinearOp:
    """Antilinear map ``v -> mat @ conj(v)``."""

    mat: np.ndarray

    def __call__(self, v: np.ndarray) -> np.ndarray:
        return self.mat @ np.conj(v)

    @property
    def shape(self):
        return self.mat.shape

    def after(self, lin: np.ndarray) -> "AntilinearOp":
        """The antilinear map ``v -> self(lin @ v)``."""
        return AntilinearOp(self.mat @ np.conj(lin))

    def before(self, lin: np.ndarray) -> "AntilinearOp":
        """The antilinear map ``v -> lin @ self(v)``."""
        return AntilinearOp(lin @ self.mat)

    def conjugate(self, x: np.ndarray) -> np.ndarray:
        """Linear operator ``self* x self`` (``self`` anti-unitary or not)."""
        return self.mat.T @ np.conj(x) @ np.conj(self.mat)

    def sandwich(self, x: np.ndarray) -> np.ndarray:
        """Linear operator ``self x self*``."""
        return self.mat @ np.conj(x) @ self.mat.T

    def around(self, x: np.ndarray) -> np.ndarray:
        """Linear operator ``self x self`` (e.g. ``J x J``)."""
        return self.mat @ np.conj(x) @ np.conj(self.mat)


def anti_compose(a: AntilinearOp, b: AntilinearOp) -> np.ndarray:
    """Linear matrix of ``a o b`` for two antilinear maps."""
    if a.mat.shape[1] != b.mat.shape[0]:
        raise ValueError(f"cannot compose {a.mat.shape} after {b.mat.shape}")
    return a.mat @ np.conj(b.mat)


def anti_adjoint(a: AntilinearOp) -> AntilinearOp:
    """Adjoint of an antilinear map: <a*(u), v> = <a(v), u>."""
    return AntilinearOp(a.mat.T)


def antiunitarity_residual(a: AntilinearOp) -> float:
    m = a.mat
    if m.shape[0] != m.shape[1]:
        return max(opnorm(m.conj().T @ m - np.eye(m.shape[1])), opnorm(m @ m.conj().T - np.eye(m.shape[0])))
    eye = np.eye(m.shape[0])
    return max(opnorm(anti_compose(a, anti_adjoint(a)) - eye), opnorm(anti_compose(anti_adjoint(a), a) - eye))


def _hermitian_part(m: np.ndarray, tol: Tolerance) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, opnorm(m))
    if opnorm(m - m.conj().T) > tol.residual_pass * scale:
        raise NotHermitianError("matrix is not hermitian within tolerance")
    return 0.5 * (m + m.conj().T)


def _psd_eigh(m: np.ndarray, tol: Tolerance):
    h = _hermitian_part(m, tol)
    w, u = np.linalg.eigh(h)
    top = max(float(w.max(initial=0.0)), 0.0)
    if w.size and w.min() < -tol.residual_pass * max(1.0, top):
        raise NotPSDError(f"negative eigenvalue {w.min():.3e}")
    keep = w > tol.rank_cut * top if top > 0 else np.zeros_like(w, dtype=bool)
    return w, u, keep


def psd_functions(m: np.ndarray, tol: Tolerance = DEFAULT_TOL):
    """Square root, pseudo-inverse square root and numerical rank of a PSD matrix."""
    w, u, keep = _psd_eigh(m, tol)
    root = np.where(keep, np.sqrt(np.clip(w, 0, None)), 0.0)
    inv_root = np.zeros_like(root)
    inv_root[keep] = 1.0 / root[keep]
    sqrt = (u * root) @ u.conj().T
    pinv_sqrt = (u * inv_root) @ u.conj().T
    return sqrt, pinv_sqrt, int(keep.sum())


def psd_power(m: np.ndarray, power: complex, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``m**power`` on the support of a PSD matrix (zero on its kernel)."""
    w, u, keep = _psd_eigh(m, tol)
    vals = np.zeros(w.shape, dtype=complex)
    vals[keep] = np.power(w[keep].astype(complex), power)
    return (u * vals) @ u.conj().T


def psd_log(m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    w, u, keep = _psd_eigh(m, tol)
    if not keep.all():
        raise NotPSDError("logarithm needs a positive definite matrix")
    return (u * np.log(w)) @ u.conj().T


def gram_quotient(g: np.ndarray, tol: Tolerance = DEFAULT_TOL):
    """Coordinates for the quotient of a spanning family by its null vectors.

    ``g`` is the Gram matrix of ``m`` spanning vectors. Returns ``(embed, r)``
    where ``embed`` is ``r x m`` and ``(embed @ c1)^H (embed @ c2) == c1^H g c2``.
    When ``g`` has full rank the symmetric square root is used, so the
    coordinates do not depend on the eigensolver's choice of basis.
    """
    w, u, keep = _psd_eigh(g, tol)
    r = int(keep.sum())
    if r == g.shape[0]:
        embed = (u * np.sqrt(w)) @ u.conj().T
    else:
        embed = np.sqrt(w[keep])[:, None] * u[:, keep].conj().T
    return embed, r


def right_inverse(embed: np.ndarray) -> np.ndarray:
    """Pseudo-inverse of a full-row-rank coordinate map."""
    return np.linalg.pinv(embed)


def vec(x: np.ndarray) -> np.ndarray:
    """Row-major flattening; keeps the trace inner product as ``vdot``."""
    return np.asarray(x).reshape(-1)


def orthonormalize(mats: Sequence[np.ndarray], tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (trace inner product) for the span of ``mats``.

    Returns an array of shape ``(d, n, n)``.
    """
    mats = [np.asarray(m, dtype=complex) for m in mats]
    if not mats:
        raise ValueError("orthonormalize needs at least one matrix")
    n = mats[0].shape[0]
    cols = np.stack([vec(m) for m in mats], axis=1)
    u, s, _ = np.linalg.svd(cols, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((0, n, n), dtype=complex)
    r = int(np.sum(s > tol.rank_cut * s[0]))
    return _phase_fix(u[:, :r]).T.reshape(r, n, n)


def _phase_fix(cols: np.ndarray) -> np.ndarray:
    # make the largest-modulus entry of every column real positive
    idx = np.argmax(np.abs(cols) > np.abs(cols).max(axis=0, keepdims=True) * (1 - 1e-8), axis=0)
    phases = cols[idx, np.arange(cols.shape[1])]
    phases = phases / np.where(np.abs(phases) > 0, np.abs(phases), 1.0)
    return cols / np.where(phases == 0, 1.0, phases)


def matrix_units(n: int) -> np.ndarray:
    basis = np.zeros((n * n, n, n), dtype=complex)
    for k in range(n * n):
        basis[k, k // n, k % n] = 1.0
    return basis


def commutation_nullspace(gens: Sequence[np.ndarray], tol: Tolerance = DEFAULT_TOL, n: int | None = None) -> np.ndarray:
    """Orthonormal basis of ``{X : X g = g X for every generator g}``.

    With no generators the full matrix-unit basis of size ``n`` is returned.
    """
    gens = [np.asarray(g, dtype=complex) for g in gens]
    if not gens:
        if n is None:
            raise ValueError("need n when no generators are given")
        return matrix_units(n)
    n = gens[0].shape[0]
    if any(g.shape != (n, n) for g in gens):
        raise ValueError("generators must be square of equal size")
    eye = np.eye(n)
    # row-major vec: vec(X g - g X) = (I (x) g^T - g (x) I) vec(X)
    blocks = [np.kron(eye, g.T) - np.kron(g, eye) for g in gens]
    # accumulate the normal matrix; it has the same null space and stays n^2 x n^2
    normal = sum(b.conj().T @ b for b in blocks)
    w, u = np.linalg.eigh(normal)
    top = max(float(w[-1]), 1.0)
    null = u[:, w <= tol.rank_cut * top]
    return _phase_fix(null).T.reshape(-1, n, n)


def basis_gram_residual(basis: np.ndarray) -> float:
    flat = basis.reshape(basis.shape[0], -1)
    return opnorm(flat.conj() @ flat.T - np.eye(basis.shape[0]))


def subspace_residual(x: np.ndarray, basis: np.ndarray, tol: Tolerance = DEFAULT_TOL, check: bool = True) -> float:
    """Operator norm of ``x`` minus its trace-orthogonal projection onto ``span(basis)``."""
    x = np.asarray(x, dtype=complex)
    basis = np.asarray(basis)
    if check and basis.shape[0] and basis_gram_residual(basis) > tol.residual_pass:
        raise ValueError("basis is not orthonormal under the trace inner product")
    if basis.shape[0] == 0:
        return opnorm(x)
    coeffs = np.einsum("kij,ij->k", basis.conj(), x)
    proj = np.einsum("k,kij->ij", coeffs, basis)
    return opnorm(x - proj)
