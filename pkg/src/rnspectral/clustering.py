"""Optimal D-cluster reduction of a Lebesgue quadrature.

A D-point Gaussian quadrature is built on the discrete measure formed by the
Lebesgue quadrature nodes and weights.  Because those weights are squared
eigenfunction averages, the D eigenpolynomials can be mapped back to linear
functionals of the attributes, which gives a D-dimensional spectral model.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev
from scipy import linalg

from .eigenkernel import fix_signs, sign_flips
from .spectral import LebesgueQuadrature

__all__ = [
    "SupportError",
    "DiscreteMeasure",
    "GaussRule",
    "ClusterBasis",
    "gauss_on_measure",
    "reduce_basis",
]

MERGE_RTOL = 1e-12
MASS_RTOL = 1e-12


class SupportError(ValueError):
    """The measure has fewer support points than requested quadrature nodes."""


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    support: np.ndarray
    mass: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.support, dtype=float).reshape(-1)
        m = np.asarray(self.mass, dtype=float).reshape(-1)
        if s.shape != m.shape:
            raise ValueError("support and mass must have equal length")
        if np.any(m < 0):
            raise ValueError("masses must be nonnegative")
        object.__setattr__(self, "support", s)
        object.__setattr__(self, "mass", m)

    @classmethod
    def lebesgue(cls, model: LebesgueQuadrature) -> "DiscreteMeasure":
        return cls(model.nodes, model.weights)

    @classmethod
    def equal(cls, nodes) -> "DiscreteMeasure":
        nodes = np.asarray(nodes, dtype=float)
        return cls(nodes, np.ones_like(nodes))

    @property
    def total(self) -> float:
        return float(self.mass.sum())

    def effective_support(self) -> np.ndarray:
        """Distinct nodes carrying non-negligible mass."""
        live = self.mass > MASS_RTOL * self.total
        pts = np.sort(self.support[live])
        if pts.size == 0:
            return pts
        scale = max(np.max(np.abs(pts)), np.finfo(float).tiny)
        keep = np.concatenate([[True], np.diff(pts) > MERGE_RTOL * scale])
        return pts[keep]

    def integrate(self, g) -> float:
        return float(np.sum(g(self.support) * self.mass))


@dataclass(frozen=True, eq=False)
class GaussRule:
    """Gaussian quadrature nodes/weights and the eigenpolynomials behind them.

    ``coeffs[:, m]`` are the Chebyshev coefficients of ``psi_G[m]`` in the
    variable ``t = (f - center) / halfwidth``.
    """

    nodes: np.ndarray
    weights: np.ndarray
    coeffs: np.ndarray
    center: float
    halfwidth: float

    def __iter__(self):
        return iter((self.nodes, self.weights, self.coeffs))

    def _t(self, f):
        return (np.asarray(f, dtype=float) - self.center) / self.halfwidth

    def basis_values(self, f):
        """Chebyshev basis ``Q_t(f)``, shape (len(f), D)."""
        return chebyshev.chebvander(self._t(np.atleast_1d(f)), self.coeffs.shape[0] - 1)

    def eigenpolynomials(self, f):
        """``psi_G[m](f)``, shape (len(f), D)."""
        return self.basis_values(f) @ self.coeffs


def gauss_on_measure(measure: DiscreteMeasure, D: int) -> GaussRule:
    """D-point Gaussian quadrature of a discrete measure.

    Exact for polynomials of degree ``<= 2D - 1``.  Weights are the inverse
    squared normalized eigenpolynomials at their own nodes.
    """
    if D < 1:
        raise ValueError("quadrature dimension must be >= 1")
    support = measure.effective_support()
    if D > support.size:
        raise SupportError(
            f"cannot build a {D}-point Gaussian quadrature: the measure has only "
            f"{support.size} distinct support points with positive mass "
            f"(nodes closer than {MERGE_RTOL:g} relative are merged)")
    lo, hi = float(support[0]), float(support[-1])
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    if half <= 0:
        half = max(abs(center), 1.0)
    rule = GaussRule(np.empty(0), np.empty(0), np.zeros((D, D)), center, half)
    # G = <Q_s|Q_t> = R^T R from a QR of the weighted Vandermonde, so the
    # pencil (F, G) reduces to U^T f U without squaring its condition number
    A = rule.basis_values(measure.support) * np.sqrt(measure.mass)[:, None]
    U, R = linalg.qr(A, mode="economic")
    r = np.abs(np.diag(R))
    if r.min() <= 1e-13 * r.max():
        raise SupportError(
            f"moment matrix of the measure is singular for D={D}; "
            f"effective support is {support.size}")
    S = U.T @ (U * measure.support[:, None])
    lam, V = linalg.eigh(0.5 * (S + S.T))
    coeffs = fix_signs(linalg.solve_triangular(R, V, lower=False))
    vals = chebyshev.chebvander((lam - center) / half, D - 1)
    at_nodes = np.einsum("mt,tm->m", vals, coeffs)
    weights = np.maximum(1.0 / at_nodes ** 2, 0.0)
    return GaussRule(lam, weights, coeffs, center, half)


@dataclass(frozen=True, eq=False)
class ClusterBasis:
    """D separating functionals of the attributes.

    ``quadrature`` is a D-dimensional :class:`LebesgueQuadrature` over the
    same attribute basis and can be passed to
    :func:`rnspectral.spectral.evaluate`.
    """

    D: int
    rule: GaussRule
    quadrature: LebesgueQuadrature
    source: LebesgueQuadrature

    @property
    def nodes(self):
        return self.quadrature.nodes

    @property
    def weights(self):
        return self.quadrature.weights

    @property
    def poly_coeffs(self):
        return self.rule.coeffs

    @property
    def x_functionals(self):
        return self.quadrature.alphas

    def lagrange_matrix(self):
        """``psi_G[m](f_G[s]) / psi_G[m](f_G[m])``; the identity in exact arithmetic."""
        V = self.rule.eigenpolynomials(self.rule.nodes)  # (s, m)
        return (V / np.diag(V)[None, :]).T


def reduce_basis(model: LebesgueQuadrature, D: int) -> ClusterBasis:
    """Cluster the quadrature ``model`` down to ``D`` nodes.

    ``psi_G[m](x) = sum_i psi_G[m](f_i) <psi_i> psi_i(x)``.
    """
    rule = gauss_on_measure(DiscreteMeasure.lebesgue(model), D)
    V = rule.eigenpolynomials(model.nodes)  # (n, D)
    alphas = model.alphas @ (V * model.psi_means[:, None])
    flips = sign_flips(alphas)
    alphas = alphas * flips[None, :]
    means = model.weights @ (V * flips[None, :])
    reduced = LebesgueQuadrature(
        nodes=rule.nodes,
        weights=rule.weights,
        alphas=alphas,
        psi_means=means,
        total_measure=model.total_measure,
        f_mean=model.f_mean,
        basis=model.basis,
    )
    return ClusterBasis(D, rule, reduced, model)
