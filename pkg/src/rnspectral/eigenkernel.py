"""Symmetric-definite generalized eigenproblem ``F a = lambda G a``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

__all__ = ["GevSolution", "NotPositiveDefiniteError", "solve_gsym", "fix_signs", "sign_flips"]

SYMMETRY_RTOL = 1e-10


class NotPositiveDefiniteError(linalg.LinAlgError):
    """Right-hand matrix is not positive definite; regularize the basis first."""


@dataclass(frozen=True, eq=False)
class GevSolution:
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # column i belongs to eigenvalues[i]

    def __iter__(self):
        return iter((self.eigenvalues, self.eigenvectors))


def sign_flips(vectors: np.ndarray) -> np.ndarray:
    """+-1 per column making its sum >= 0; zero sums go by the first nonzero entry."""
    vectors = np.asarray(vectors, dtype=float)
    sums = vectors.sum(axis=0)
    flips = np.ones(vectors.shape[1])
    for i, s in enumerate(sums):
        if s == 0.0:
            nz = np.flatnonzero(vectors[:, i])
            s = vectors[nz[0], i] if nz.size else 1.0
        if s < 0:
            flips[i] = -1.0
    return flips


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    return np.asarray(vectors, dtype=float) * sign_flips(vectors)[None, :]


def _check_symmetric(A, name):
    scale = np.max(np.abs(A)) if A.size else 0.0
    if np.max(np.abs(A - A.T), initial=0.0) > SYMMETRY_RTOL * max(scale, np.finfo(float).tiny):
        raise ValueError(f"{name} is not symmetric")


def solve_gsym(F, G) -> GevSolution:
    """Solve ``F a = lambda G a`` for symmetric F and positive definite G.

    G is Cholesky-factored as ``L L^T``, the standard problem
    ``L^-1 F L^-T`` is diagonalized and the eigenvectors are mapped back with
    ``L^-T``, so they come out G-orthonormal.  Eigenvalues are ascending.

    Raises
    ------
    NotPositiveDefiniteError
        If the Cholesky factorization of G fails.
    ValueError
        If F or G is not symmetric.
    """
    F = np.asarray(F, dtype=float)
    G = np.asarray(G, dtype=float)
    if F.ndim != 2 or F.shape != G.shape or F.shape[0] != F.shape[1]:
        raise ValueError("F and G must be square matrices of equal size")
    _check_symmetric(F, "F")
    _check_symmetric(G, "G")
    Fs = 0.5 * (F + F.T)
    Gs = 0.5 * (G + G.T)
    try:
        L = linalg.cholesky(Gs, lower=True)
    except linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(
            "Gram matrix is not positive definite; a basis regularization is required"
        ) from exc
    Y = linalg.solve_triangular(L, Fs, lower=True)
    S = linalg.solve_triangular(L, Y.T, lower=True)
    S = 0.5 * (S + S.T)
    lam, U = linalg.eigh(S)
    alphas = linalg.solve_triangular(L.T, U, lower=False)
    return GevSolution(lam, fix_signs(alphas))
