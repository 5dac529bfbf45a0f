"""Gram matrices, the Lebesgue quadrature and point predictors.

For a basis ``X_k`` and a weighted sample, the quadrature nodes are the
eigenvalues of ``<X_j|f|X_k> a = lambda <X_j|X_k> a`` and the weight of node
``i`` is ``<psi_i>^2`` with ``psi_i(x) = sum_k a_ik X_k(x)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigenkernel import solve_gsym

__all__ = [
    "GramPair",
    "LebesgueQuadrature",
    "PointEvaluation",
    "Evaluation",
    "build_gram",
    "build_gram_rows",
    "lebesgue_quadrature",
    "evaluate",
    "evaluate_rows",
    "prior_entropy",
    "variation_identity",
    "orthonormality_residuals",
    "xlogx_entropy",
]


@dataclass(frozen=True, eq=False)
class GramPair:
    G: np.ndarray
    F: np.ndarray
    total_measure: float
    moments: np.ndarray  # <X_j>
    f_moment: float  # <f>
    f2_moment: float  # <f^2>
    basis: object = None

    @property
    def f_mean(self) -> float:
        return self.f_moment / self.total_measure


@dataclass(frozen=True, eq=False)
class LebesgueQuadrature:
    nodes: np.ndarray
    weights: np.ndarray
    alphas: np.ndarray  # (basis dim, D), columns are psi functionals
    psi_means: np.ndarray  # signed <psi_i>; weights == psi_means**2
    total_measure: float
    f_mean: float
    basis: object = None

    @property
    def dim(self) -> int:
        return self.nodes.shape[0]

    def psi(self, x):
        """psi_i at raw attribute vector(s) ``x``."""
        X = self.basis.apply(x) if self.basis is not None else np.asarray(x, dtype=float)
        return X @ self.alphas

    def with_basis(self, basis) -> "LebesgueQuadrature":
        return LebesgueQuadrature(self.nodes, self.weights, self.alphas, self.psi_means,
                                  self.total_measure, self.f_mean, basis)


@dataclass(frozen=True)
class PointEvaluation:
    f_rn: float
    f_ls: float
    f_rnw: float
    christoffel: float
    coverage: float
    psi: np.ndarray
    proj: np.ndarray
    entropy_cond: float
    degenerate: bool = False


@dataclass(frozen=True, eq=False)
class Evaluation:
    """Row-wise evaluation of many points; arrays are parallel to the rows."""

    f_rn: np.ndarray
    f_ls: np.ndarray
    f_rnw: np.ndarray
    christoffel: np.ndarray
    coverage: np.ndarray
    psi: np.ndarray
    proj: np.ndarray
    entropy_cond: np.ndarray
    degenerate: np.ndarray

    def __len__(self):
        return self.f_rn.shape[0]

    def __getitem__(self, l) -> PointEvaluation:
        return PointEvaluation(
            float(self.f_rn[l]), float(self.f_ls[l]), float(self.f_rnw[l]),
            float(self.christoffel[l]), float(self.coverage[l]),
            self.psi[l].copy(), self.proj[l].copy(), float(self.entropy_cond[l]),
            bool(self.degenerate[l]),
        )


def build_gram_rows(X, f, w, basis=None) -> GramPair:
    """Gram pair for rows already expressed in the basis."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    f = np.asarray(f, dtype=float)
    w = np.asarray(w, dtype=float)
    Xw = X * w[:, None]
    G = X.T @ Xw
    F = X.T @ (Xw * f[:, None])
    return GramPair(
        G=0.5 * (G + G.T),
        F=0.5 * (F + F.T),
        total_measure=float(w.sum()),
        moments=w @ X,
        f_moment=float(w @ f),
        f2_moment=float(w @ (f * f)),
        basis=basis,
    )


def build_gram(sample, basis=None) -> GramPair:
    """``G = <X_j|X_k>`` and ``F = <X_j|f|X_k>`` as weighted sums over the sample."""
    X = basis.apply(sample.x) if basis is not None else sample.x
    return build_gram_rows(X, sample.f, sample.w, basis)


def lebesgue_quadrature(gram: GramPair) -> LebesgueQuadrature:
    sol = solve_gsym(gram.F, gram.G)
    # signed sum_l psi_i(x_l) w_l, linear in the coefficients
    means = gram.moments @ sol.eigenvectors
    return LebesgueQuadrature(
        nodes=sol.eigenvalues,
        weights=means ** 2,
        alphas=sol.eigenvectors,
        psi_means=means,
        total_measure=gram.total_measure,
        f_mean=gram.f_mean,
        basis=gram.basis,
    )


def xlogx_entropy(p) -> float:
    """``-sum p ln p`` with ``0 ln 0 = 0``."""
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def evaluate_rows(model: LebesgueQuadrature, x) -> Evaluation:
    """Evaluate the predictors at every row of ``x`` (raw attributes).

    Points where every psi vanishes get the prior mean for ``f_RN``/``f_RNW``,
    zero Christoffel function and zero coverage; they are flagged in
    ``degenerate``.
    """
    psi = np.atleast_2d(model.psi(np.atleast_2d(np.asarray(x, dtype=float))))
    lam = model.nodes
    w = model.weights
    sq = psi ** 2
    norm = sq.sum(axis=1)
    wsq = sq @ w
    ok = norm > 0
    okw = wsq > 0
    safe = np.where(ok, norm, 1.0)
    safew = np.where(okw, wsq, 1.0)
    f_rn = np.where(ok, (sq @ lam) / safe, model.f_mean)
    f_rnw = np.where(okw, (sq @ (lam * w)) / safew, model.f_mean)
    christoffel = np.where(ok, 1.0 / safe, 0.0)
    proj = np.where(ok[:, None], sq / safe[:, None], 0.0)
    coverage = np.where(ok, wsq / safe, 0.0)
    f_ls = psi @ (lam * model.psi_means)
    post = proj * w[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(post > 0, post / np.where(coverage > 0, coverage, 1.0)[:, None], 1.0)
        terms = np.where(post > 0, post * np.log(ratio), 0.0)
    entropy = -terms.sum(axis=1) / model.total_measure
    return Evaluation(f_rn, f_ls, f_rnw, christoffel, coverage, psi, proj, entropy, ~ok)


def evaluate(model: LebesgueQuadrature, x_raw) -> PointEvaluation:
    """All predictors at a single raw attribute vector."""
    x_raw = np.asarray(x_raw, dtype=float).reshape(1, -1)
    return evaluate_rows(model, x_raw)[0]


def prior_entropy(model: LebesgueQuadrature) -> float:
    p = model.weights / model.total_measure
    return xlogx_entropy(p)


def variation_identity(gram: GramPair, model: LebesgueQuadrature):
    """Both sides of the variation expansion, returned as ``(lhs, rhs)``.

    ``lhs = <f^2> - sum f_i^2 w_i`` and
    ``rhs = <(f - fbar)^2> - sum (f_i - fbar)^2 w_i``.
    """
    fbar = gram.f_mean
    lhs = gram.f2_moment - np.sum(model.nodes ** 2 * model.weights)
    centered = gram.f2_moment - gram.f_moment * fbar
    rhs = centered - np.sum((model.nodes - fbar) ** 2 * model.weights)
    return float(lhs), float(rhs)


def orthonormality_residuals(model: LebesgueQuadrature, sample):
    """Max deviations of ``sum psi_i psi_m w`` from delta and of ``sum psi_i psi_m f w``
    from ``f_i delta``, plus ``max |w_i - (sum psi_i w)^2|``."""
    psi = model.psi(sample.x)
    pw = psi * sample.w[:, None]
    norm = psi.T @ pw
    fnorm = psi.T @ (pw * sample.f[:, None])
    D = model.dim
    r_norm = np.max(np.abs(norm - np.eye(D)))
    r_f = np.max(np.abs(fnorm - np.diag(model.nodes)))
    r_w = np.max(np.abs((sample.w @ psi) ** 2 - model.weights))
    return float(r_norm), float(r_f), float(r_w)
