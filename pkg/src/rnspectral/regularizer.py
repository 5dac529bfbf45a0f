"""Attribute basis regularization.

Every method returns a :class:`RegularizedBasis`: an affine map from raw
attributes to ``1 + d`` functionals whose Gram matrix is positive definite,
the constant function being the last one.  No class label information is
used.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .eigenkernel import NotPositiveDefiniteError

__all__ = [
    "EPS",
    "RegularizedBasis",
    "regularize",
    "regularize_ev",
    "regularize_lin",
    "regularize_none",
    "METHODS",
]

EPS = 1e3 * np.finfo(float).eps

METHODS = ("NONE", "EV", "LIN")


@dataclass(frozen=True, eq=False)
class RegularizedBasis:
    """Affine basis map ``X = transform @ y + offset`` with ``y = inner(x)``.

    ``inner`` is an optional preceding feature map (e.g. product attributes);
    when it is ``None`` the map acts on raw attributes directly.
    """

    transform: np.ndarray  # (p, n_features)
    offset: np.ndarray  # (p,)
    means: np.ndarray  # feature means used for centering
    kept_sets: tuple = ((), ())  # (S, S^d)
    d: int = 0
    method: str = "EV"
    inner: object = None

    @property
    def dim(self) -> int:
        return self.transform.shape[0]

    def features(self, x):
        x = np.asarray(x, dtype=float)
        return self.inner.apply(x) if self.inner is not None else x

    def apply(self, x):
        y = self.features(x)
        single = y.ndim == 1
        y = np.atleast_2d(y)
        X = y @ self.transform.T + self.offset
        return X[0] if single else X


def _weighted_stats(y, w):
    total = w.sum()
    means = (w @ y) / total
    yc = y - means
    cov = yc.T @ (yc * w[:, None])
    second = (y * y).T @ w / total
    return total, means, yc, cov, second


def _informative(cov, second, total):
    """Index set S of components whose spread exceeds numerical noise."""
    var = np.diag(cov) / total
    scale = np.where(second > 0, second, 1.0)
    keep = (var > 0) & (var > (EPS ** 2) * scale)
    return np.flatnonzero(keep)


def _basis(coeffs, means, S, Sd, method, n_features, inner):
    d = coeffs.shape[0]
    transform = np.zeros((d + 1, n_features))
    transform[:d, :] = coeffs
    offset = np.zeros(d + 1)
    offset[:d] = -coeffs @ means
    offset[d] = 1.0
    return RegularizedBasis(transform, offset, means, (tuple(S), tuple(Sd)), d, method, inner)


def regularize_ev(sample, inner=None) -> RegularizedBasis:
    """Eigenvalue regularization.

    Center the attributes, drop the ones that are constant to numerical
    precision (set S), solve the covariance eigenproblem against its own
    diagonal and keep the eigenvectors with normalized variance above
    ``EPS`` (set S^d).  The constant function is appended.
    """
    w = np.asarray(sample.w, dtype=float)
    y = inner.apply(sample.x) if inner is not None else np.asarray(sample.x, dtype=float)
    total, means, _, cov, second = _weighted_stats(y, w)
    S = _informative(cov, second, total)
    if S.size == 0:
        return _basis(np.zeros((0, y.shape[1])), means, S, (), "EV", y.shape[1], inner)
    C = cov[np.ix_(S, S)]
    dscale = 1.0 / np.sqrt(np.diag(C))
    corr = C * dscale[:, None] * dscale[None, :]
    lam, U = linalg.eigh(0.5 * (corr + corr.T))
    Sd = np.flatnonzero(lam > EPS)
    # rescale so that <X_i X_j> = <1> delta_ij
    alphas = (U[:, Sd] * dscale[:, None]) * np.sqrt(total / lam[Sd])
    coeffs = np.zeros((Sd.size, y.shape[1]))
    coeffs[:, S] = alphas.T
    return _basis(coeffs, means, S, Sd, "EV", y.shape[1], inner)


def _pivoted_cholesky(A, tol):
    A = np.array(A, dtype=float)
    n = A.shape[0]
    diag = np.diag(A).copy()
    L = np.zeros((n, n))
    piv = []
    for r in range(n):
        rest = [j for j in range(n) if j not in piv]
        j = max(rest, key=lambda k: diag[k])
        if diag[j] <= tol:
            break
        col = A[:, j] - L[:, :r] @ L[j, :r]
        col /= np.sqrt(diag[j])
        col[piv] = 0.0
        L[:, r] = col
        piv.append(j)
        diag -= col ** 2
        diag[piv] = 0.0
        if len(piv) == n:
            break
    return piv, L[:, :len(piv)]


def regularize_lin(sample, inner=None) -> RegularizedBasis:
    """Elimination regularization.

    Same centering and set S as :func:`regularize_ev`; the normalized
    covariance is then eliminated with symmetric complete pivoting (largest
    remaining diagonal first), stopping when the pivot drops to ``EPS`` of the
    initial unit scale.  The kept pivots are orthogonalized against each other.
    """
    w = np.asarray(sample.w, dtype=float)
    y = inner.apply(sample.x) if inner is not None else np.asarray(sample.x, dtype=float)
    total, means, _, cov, second = _weighted_stats(y, w)
    S = _informative(cov, second, total)
    if S.size == 0:
        return _basis(np.zeros((0, y.shape[1])), means, S, (), "LIN", y.shape[1], inner)
    C = cov[np.ix_(S, S)]
    dscale = 1.0 / np.sqrt(np.diag(C))
    corr = C * dscale[:, None] * dscale[None, :]
    piv, L = _pivoted_cholesky(corr, EPS)
    Lpp = L[piv, :]
    # rows of Lpp^-1 act on the standardized pivot components
    inv = linalg.solve_triangular(Lpp, np.eye(len(piv)), lower=True)
    alphas = inv * dscale[piv][None, :] * np.sqrt(total)
    coeffs = np.zeros((len(piv), y.shape[1]))
    coeffs[:, S[piv]] = alphas
    return _basis(coeffs, means, S, tuple(piv), "LIN", y.shape[1], inner)


def regularize_none(sample, inner=None) -> RegularizedBasis:
    """Use the attributes as they are, appending a constant if none is present.

    Raises :class:`NotPositiveDefiniteError` when the resulting Gram matrix is
    singular.
    """
    w = np.asarray(sample.w, dtype=float)
    y = inner.apply(sample.x) if inner is not None else np.asarray(sample.x, dtype=float)
    total, means, _, cov, second = _weighted_stats(y, w)
    n = y.shape[1]
    constant = np.diag(cov) / total <= (EPS ** 2) * np.where(second > 0, second, 1.0)
    has_const = bool(np.any(constant & (second > 0)))
    transform = np.eye(n)
    offset = np.zeros(n)
    if not has_const:
        transform = np.vstack([transform, np.zeros((1, n))])
        offset = np.append(offset, 1.0)
    basis = RegularizedBasis(transform, offset, means, (tuple(range(n)), ()),
                             transform.shape[0] - 1, "NONE", inner)
    X = y @ transform.T + offset
    G = X.T @ (X * w[:, None])
    try:
        linalg.cholesky(G, lower=True)
    except linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(
            "Gram matrix is singular with --regularization_method=NONE") from exc
    return basis


def regularize(sample, method: str = "EV", inner=None) -> RegularizedBasis:
    method = method.upper()
    if method == "EV":
        return regularize_ev(sample, inner)
    if method == "LIN":
        return regularize_lin(sample, inner)
    if method == "NONE":
        return regularize_none(sample, inner)
    raise ValueError(f"unknown regularization method {method!r}, expected one of {METHODS}")
