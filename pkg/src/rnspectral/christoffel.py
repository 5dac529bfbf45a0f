"""Christoffel function spectrum: coverage expansion, entropy, unsupervised
clustering and the low-rank representation of the data matrix."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .clustering import DiscreteMeasure, GaussRule, gauss_on_measure
from .eigenkernel import solve_gsym
from .spectral import xlogx_entropy

__all__ = [
    "christoffel_values",
    "ChristoffelSpectrum",
    "LrrBasis",
    "UnsupervisedClusters",
    "christoffel_spectrum",
    "lrr_reduce",
    "unsupervised_clusters",
]


def christoffel_values(X, G) -> np.ndarray:
    """``K(x) = 1 / (x^T G^-1 x)`` for each row of ``X`` (basis coordinates)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    c = linalg.cho_factor(G, lower=True)
    q = np.einsum("lj,jl->l", X, linalg.cho_solve(c, X.T))
    return 1.0 / q


@dataclass(frozen=True, eq=False)
class ChristoffelSpectrum:
    eigenvalues: np.ndarray  # ascending lambda_K
    alphas: np.ndarray  # columns are psi_K functionals in basis coordinates
    total_measure: float
    entropy: float
    G: np.ndarray
    KG: np.ndarray  # <X_j|K|X_k>
    raw_projections: np.ndarray  # <x_k|psi_K[i]> for raw attributes, (n_raw, n)
    basis: object = None

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def psi(self, x):
        X = self.basis.apply(x) if self.basis is not None else np.asarray(x, dtype=float)
        return X @ self.alphas

    def coverage_expansion(self):
        """``(lambda_K, order)`` sorted descending; the terms sum to ``<1>``."""
        order = np.argsort(self.eigenvalues)[::-1]
        return self.eigenvalues[order], order

    def variation(self):
        """``sum (lambda_K - <1>/n)^2`` from the spectrum and as a matrix spur."""
        c = self.total_measure / self.dim
        spectral = float(np.sum((self.eigenvalues - c) ** 2))
        A = linalg.cho_solve(linalg.cho_factor(self.G, lower=True), self.KG) - c * np.eye(self.dim)
        spur = float(np.trace(A @ A))
        return spectral, spur


def christoffel_spectrum(sample, basis=None) -> ChristoffelSpectrum:
    """Spectrum of the Christoffel function used as the class label."""
    X = basis.apply(sample.x) if basis is not None else np.asarray(sample.x, dtype=float)
    w = np.asarray(sample.w, dtype=float)
    Xw = X * w[:, None]
    G = X.T @ Xw
    G = 0.5 * (G + G.T)
    K = christoffel_values(X, G)
    KG = X.T @ (Xw * K[:, None])
    KG = 0.5 * (KG + KG.T)
    sol = solve_gsym(KG, G)
    total = float(w.sum())
    lam = sol.eigenvalues
    # sum lambda_K == <1>; dividing by the computed sum keeps S in [0, ln n]
    p = np.clip(lam, 0.0, None)
    psi = X @ sol.eigenvectors
    raw = np.asarray(sample.x, dtype=float).T @ (psi * w[:, None])
    return ChristoffelSpectrum(
        eigenvalues=lam,
        alphas=sol.eigenvectors,
        total_measure=total,
        entropy=xlogx_entropy(p / p.sum()),
        G=G,
        KG=KG,
        raw_projections=raw,
        basis=basis,
    )


@dataclass(frozen=True, eq=False)
class LrrBasis:
    D: int
    indices: np.ndarray  # kept eigenpairs, largest lambda_K first
    alphas: np.ndarray
    projections: np.ndarray  # (n_raw, D)
    error: float
    basis: object = None

    def phi(self, x):
        X = self.basis.apply(x) if self.basis is not None else np.asarray(x, dtype=float)
        return X @ self.alphas

    def reconstruct(self, x):
        """Low-rank data matrix ``sum_i <x_k|phi_i> phi_i(x)`` for the rows of ``x``."""
        return self.phi(x) @ self.projections.T


def lrr_reduce(spectrum: ChristoffelSpectrum, D: int) -> LrrBasis:
    """Keep the ``D`` Christoffel eigenvectors of largest coverage."""
    if not 1 <= D <= spectrum.dim:
        raise ValueError(f"D must be in [1, {spectrum.dim}]")
    lam, order = spectrum.coverage_expansion()
    keep = order[:D]
    if D == spectrum.dim:
        error = 0.0
    else:
        error = float(spectrum.total_measure - np.sum(spectrum.eigenvalues[keep]))
    return LrrBasis(
        D=D,
        indices=keep,
        alphas=spectrum.alphas[:, keep],
        projections=spectrum.raw_projections[:, keep],
        error=max(error, 0.0),
        basis=spectrum.basis,
    )


@dataclass(frozen=True, eq=False)
class UnsupervisedClusters:
    rule: GaussRule
    spectrum: ChristoffelSpectrum

    @property
    def nodes(self):
        return self.rule.nodes

    @property
    def weights(self):
        return self.rule.weights

    def density(self, x) -> np.ndarray:
        """``p[m](x) = sum_i [psi_K[i](x) psi_G[m](lambda_K[i])]^2``, shape (rows, D)."""
        psi = np.atleast_2d(self.spectrum.psi(np.atleast_2d(x)))
        V = self.rule.eigenpolynomials(self.spectrum.eigenvalues)  # (n, D)
        return (psi ** 2) @ (V ** 2)


def unsupervised_clusters(spectrum: ChristoffelSpectrum, D: int) -> UnsupervisedClusters:
    """Gaussian quadrature on the equal-weight measure over the ``lambda_K``."""
    rule = gauss_on_measure(DiscreteMeasure.equal(spectrum.eigenvalues), D)
    return UnsupervisedClusters(rule, spectrum)
