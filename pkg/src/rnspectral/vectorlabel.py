"""Vector-valued class labels.

Two Gram matrices, one per space, plus the cross moments ``<x_j f_k>``.  No
mixed x-f products enter a basis, so every quantity here is invariant under
independent invertible remaps of the x components and of the f components.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .christoffel import ChristoffelSpectrum, christoffel_values
from .eigenkernel import solve_gsym
from .regularizer import regularize
from .spectral import GramPair, build_gram_rows, lebesgue_quadrature

__all__ = [
    "DegenerateNormError",
    "CrossGram",
    "ErrorReport",
    "RelativeFrequency",
    "cross_gram",
    "cross_gram_regularized",
    "projected_f_gram",
    "error_rank",
    "error_rank_spectrum",
    "christoffel_f_matrix",
    "coverage_operator",
    "error_coverage_spectrum",
    "error_coverage_rows",
    "prob_given",
    "f_least_squares",
    "error_tilde",
    "error_report",
    "b_vector",
    "b_spectrum",
    "relative_frequency_spectrum",
    "diagonalize_f_in_K_basis",
    "f_rn_vector",
    "f_rnw_vector",
    "predictor_error",
]


class DegenerateNormError(ValueError):
    """``y`` is orthogonal to the projection of the f-space on the x-space."""


def _rows(a):
    a = np.asarray(a, dtype=float)
    return a[:, None] if a.ndim == 1 else a


def _solve(G, B):
    return linalg.cho_solve(linalg.cho_factor(G, lower=True), B)


def _sym(A):
    return 0.5 * (A + A.T)


@dataclass(frozen=True, eq=False)
class CrossGram:
    Gx: np.ndarray
    Gf: np.ndarray
    Gxf: np.ndarray
    total_measure: float
    X: np.ndarray  # sample rows in the x basis
    F: np.ndarray  # sample rows in the f basis
    w: np.ndarray
    x_basis: object = None
    f_basis: object = None

    @property
    def n(self) -> int:
        return self.Gx.shape[0]

    @property
    def m(self) -> int:
        return self.Gf.shape[0]

    def x_coords(self, x):
        return self.x_basis.apply(x) if self.x_basis is not None else np.asarray(x, dtype=float)

    def f_coords(self, f):
        return self.f_basis.apply(f) if self.f_basis is not None else np.asarray(f, dtype=float)


def cross_gram(x, f, w, x_basis=None, f_basis=None) -> CrossGram:
    """``Gx = <x x>``, ``Gf = <f f>``, ``Gxf = <x f>``.

    Both bases must already contain a constant and be nondegenerate; use
    :func:`cross_gram_regularized` otherwise.
    """
    x = _rows(x)
    f = _rows(f)
    w = np.asarray(w, dtype=float)
    X = x_basis.apply(x) if x_basis is not None else x
    F = f_basis.apply(f) if f_basis is not None else f
    Xw = X * w[:, None]
    return CrossGram(
        Gx=_sym(X.T @ Xw),
        Gf=_sym(F.T @ (F * w[:, None])),
        Gxf=Xw.T @ F,
        total_measure=float(w.sum()),
        X=X,
        F=F,
        w=w,
        x_basis=x_basis,
        f_basis=f_basis,
    )


@dataclass(frozen=True)
class _Rows:
    x: np.ndarray
    w: np.ndarray


def cross_gram_regularized(x, f, w, method: str = "EV") -> CrossGram:
    """Regularize x and f independently (each gets a constant), then build the Grams."""
    x = _rows(x)
    f = _rows(f)
    w = np.asarray(w, dtype=float)
    bx = regularize(_Rows(x, w), method)
    bf = regularize(_Rows(f, w), method)
    return cross_gram(x, f, w, bx, bf)


def projected_f_gram(cg: CrossGram) -> np.ndarray:
    """``<f_j(x) f_k(x)>``: f projected on the x space by least squares."""
    return _sym(cg.Gxf.T @ _solve(cg.Gx, cg.Gxf))


def error_rank_spectrum(cg: CrossGram) -> np.ndarray:
    """Eigenvalues of ``<f(x) f(x)> a = lambda <f f> a``, all in [0, 1]."""
    return solve_gsym(projected_f_gram(cg), cg.Gf).eigenvalues


def error_rank(cg: CrossGram) -> float:
    """``m - Spur(<f(x) f(x)> Gf^-1)``; 0 when the f space lies inside the x space."""
    P = projected_f_gram(cg)
    return float(cg.m - np.trace(_solve(cg.Gf, P)))


def christoffel_f_matrix(cg: CrossGram) -> np.ndarray:
    """``<f_j|K(f)|f_k>`` with the Christoffel function of the f space."""
    Kf = christoffel_values(cg.F, cg.Gf)
    return _sym(cg.F.T @ (cg.F * (Kf * cg.w)[:, None]))


def coverage_operator(cg: CrossGram, christoffel_f=None) -> np.ndarray:
    """``K(f->x) = Gxf Gf^-1 <f|K(f)|f> Gf^-1 Gxf^T``, an n x n matrix of rank <= m."""
    Kff = christoffel_f_matrix(cg) if christoffel_f is None else np.asarray(christoffel_f, dtype=float)
    B = _solve(cg.Gf, cg.Gxf.T)  # Gf^-1 Gxf^T, (m, n)
    return _sym(B.T @ Kff @ B)


def error_coverage_spectrum(cg: CrossGram, christoffel_f=None):
    """Spectrum of ``K(f->x) a = lambda Gx a`` and ``Error = <1> - sum lambda``."""
    if cg.m > cg.n:
        raise ValueError(f"coverage error needs m <= n, got m={cg.m}, n={cg.n}")
    lam = solve_gsym(coverage_operator(cg, christoffel_f), cg.Gx).eigenvalues
    return lam, float(cg.total_measure - lam.sum())


def error_coverage_rows(cg: CrossGram):
    """Per-observation form: ``varpi(f_l)`` and ``Error = <1> - sum varpi(f_l) w_l``."""
    A = _solve(cg.Gf, cg.F.T)  # Gf^-1 g for every row, (m, M)
    proj = cg.Gxf @ A  # Gxf Gf^-1 g, (n, M)
    num = np.einsum("jl,jl->l", proj, _solve(cg.Gx, proj))
    den = np.einsum("jl,jl->l", cg.F.T, A)
    varpi = num / den
    return varpi, float(cg.total_measure - varpi @ cg.w)


def _projector(cg: CrossGram, Y):
    # rows y^T Gx^-1 Gxf, i.e. the least squares f moments at y
    return _solve(cg.Gx, np.atleast_2d(Y).T).T @ cg.Gxf


def f_least_squares(cg: CrossGram, y) -> np.ndarray:
    """``f_LS(y) = y^T Gx^-1 Gxf`` in f-basis coordinates (y in x-basis coordinates)."""
    out = _projector(cg, y)
    return out[0] if np.ndim(y) == 1 else out


def _norm2(cg, P):
    return np.einsum("lj,jl->l", P, _solve(cg.Gf, P.T))


def prob_given(cg: CrossGram, y, g):
    """Joint probability estimator ``Prob(g | y)`` in [0, 1].

    ``y`` and ``g`` are in x-basis and f-basis coordinates; rows are paired
    when both are 2-D.
    """
    single = np.ndim(y) == 1 and np.ndim(g) == 1
    P = _projector(cg, y)  # (L, m)
    G = np.atleast_2d(np.asarray(g, dtype=float))
    norm2 = _norm2(cg, P)
    if np.any(~(norm2 > 0)):
        raise DegenerateNormError(
            "Norm^2(y) vanishes: y is orthogonal to the projected f space")
    Gi = _solve(cg.Gf, G.T).T  # Gf^-1 g
    num = np.einsum("lj,lj->l", P, Gi) ** 2
    den = norm2 * np.einsum("lj,lj->l", G, Gi)
    p = num / den
    return float(p[0]) if single else p


def error_tilde(cg: CrossGram) -> float:
    """``<1> - sum_l w_l Prob(f_l | x_l)``."""
    return float(cg.total_measure - cg.w @ prob_given(cg, cg.X, cg.F))


def b_vector(cg: CrossGram, y) -> np.ndarray:
    P = _projector(cg, y)[0]
    n2 = _norm2(cg, P[None, :])[0]
    if not n2 > 0:
        raise DegenerateNormError("Norm^2(y) vanishes")
    return P / np.sqrt(n2)


def b_spectrum(cg: CrossGram, y) -> np.ndarray:
    """Eigenvalues of ``b b^T a = lambda Gf a``; one equals 1, the rest vanish."""
    b = b_vector(cg, y)
    return solve_gsym(np.outer(b, b), cg.Gf).eigenvalues


@dataclass(frozen=True)
class ErrorReport:
    error_rank: float
    error_coverage: float
    coverage_spectrum: np.ndarray
    error_tilde: float


def error_report(cg: CrossGram) -> ErrorReport:
    lam, err = error_coverage_spectrum(cg)
    return ErrorReport(error_rank(cg), err, lam, error_tilde(cg))


@dataclass(frozen=True, eq=False)
class RelativeFrequency:
    eigenvalues: np.ndarray
    alphas: np.ndarray
    x_basis: object = None

    def psi(self, x):
        X = self.x_basis.apply(x) if self.x_basis is not None else np.asarray(x, dtype=float)
        return X @ self.alphas

    def R(self, x) -> np.ndarray:
        """Localized relative frequency ``sum lambda psi^2 / sum psi^2``."""
        sq = np.atleast_2d(self.psi(np.atleast_2d(x))) ** 2
        return (sq @ self.eigenvalues) / sq.sum(axis=1)


def relative_frequency_spectrum(x, f, w, x_basis=None, f_basis=None) -> RelativeFrequency:
    """``<x|K(f(x))|x> a = lambda <x|K(x)|x> a``: how many more f than x observations."""
    cg = cross_gram(x, f, w, x_basis, f_basis)
    Kx = christoffel_values(cg.X, cg.Gx)
    Kf = christoffel_values(cg.F, cg.Gf)
    Xw = cg.X * cg.w[:, None]
    A = _sym(Xw.T @ (cg.X * Kf[:, None]))
    B = _sym(Xw.T @ (cg.X * Kx[:, None]))
    sol = solve_gsym(A, B)
    return RelativeFrequency(sol.eigenvalues, sol.eigenvectors, x_basis)


def diagonalize_f_in_K_basis(gram: GramPair, spectrum: ChristoffelSpectrum) -> GramPair:
    """Drop the off-diagonal elements of F in the ``psi_K`` basis.

    With ``A^T G A = 1`` the transform back is ``F' = G A diag(A^T F A) A^T G``.
    """
    A = spectrum.alphas
    d = np.einsum("ji,jk,ki->i", A, gram.F, A)
    GA = gram.G @ A
    F = _sym((GA * d[None, :]) @ GA.T)
    return GramPair(gram.G, F, gram.total_measure, gram.moments,
                    gram.f_moment, gram.f2_moment, gram.basis)


def f_rn_vector(X, f, w, y, basis=None) -> np.ndarray:
    """Component-wise ``f_RN`` at rows ``y``; one quadrature per f component.

    ``X`` are sample rows (raw if ``basis`` is given), ``f`` is (M, m).
    """
    f = _rows(f)
    Xb = basis.apply(X) if basis is not None else np.asarray(X, dtype=float)
    out = []
    for j in range(f.shape[1]):
        model = lebesgue_quadrature(build_gram_rows(Xb, f[:, j], w, basis))
        psi2 = np.atleast_2d(model.psi(np.atleast_2d(y))) ** 2
        out.append((psi2 @ model.nodes) / psi2.sum(axis=1))
    return np.column_stack(out)


def f_rnw_vector(spectrum: ChristoffelSpectrum, X, f, w, y) -> np.ndarray:
    """Vector ``f_RNW`` assuming each f component is diagonal in ``psi_K``.

    ``X`` are raw sample rows mapped through ``spectrum.basis``.
    """
    f = _rows(f)
    w = np.asarray(w, dtype=float)
    psi_s = spectrum.psi(X)  # (M, n)
    # <psi_K[i]|f_j|psi_K[i]>, (n, m)
    diag = (psi_s ** 2 * w[:, None]).T @ f
    psi2 = np.atleast_2d(spectrum.psi(np.atleast_2d(y))) ** 2
    lw = psi2 * spectrum.eigenvalues[None, :]
    return (lw @ diag) / lw.sum(axis=1)[:, None]


def predictor_error(f, w, weight_fn, x, prediction=None):
    """Error of an averaging predictor with row weight ``W(x_l)``.

    ``W_l = weight_fn(x_l) * w_l`` and ``Error = <1>_W - K_W(f_pred)``.
    Returns ``(error, relative_error, f_pred)``.

    ``f`` must include a constant.  By default ``f_pred`` is the W-average of
    the f rows; there ``G_W e_0 = <1>_W f_pred`` forces ``K_W = <1>_W`` and the
    error vanishes identically.  Pass ``prediction`` (f-basis coordinates) to
    score any other predicted vector under the same W measure.
    """
    f = _rows(f)
    W = np.asarray(weight_fn(_rows(x)), dtype=float).reshape(-1) * np.asarray(w, dtype=float)
    if np.any(W < 0):
        raise ValueError("row weights must be nonnegative")
    total = float(W.sum())
    pred = W @ f / total if prediction is None else np.asarray(prediction, dtype=float)
    Gw = _sym(f.T @ (f * W[:, None]))
    K = float(christoffel_values(pred[None, :], Gw)[0])
    err = total - K
    return err, err / total, pred
