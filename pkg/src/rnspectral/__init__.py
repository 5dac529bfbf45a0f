"""Radon-Nikodym spectral interpolation, classification and clustering.

A weighted sample ``(x, f, w)`` defines two Gram matrices in a regularized
attribute basis.  Their generalized eigenproblem yields a Lebesgue quadrature
(cluster values and masses), from which interpolation and classification
predictors, Christoffel-function coverage and Gaussian-quadrature clustering
follow.
"""
from .christoffel import (ChristoffelSpectrum, LrrBasis, christoffel_spectrum,
                          christoffel_values, lrr_reduce, unsupervised_clusters)
from .clustering import ClusterBasis, DiscreteMeasure, SupportError, gauss_on_measure, reduce_basis
from .eigenkernel import NotPositiveDefiniteError, solve_gsym
from .observations import ColumnSpec, Sample, parse_column_spec, read_sample, write_evaluation
from .products import ProductBasis, ProductLimitError, expand
from .regularizer import RegularizedBasis, regularize
from .spectral import (Evaluation, LebesgueQuadrature, build_gram, evaluate, evaluate_rows,
                       lebesgue_quadrature)

__version__ = "0.1.0"

__all__ = [
    "ChristoffelSpectrum", "LrrBasis", "christoffel_spectrum", "christoffel_values",
    "lrr_reduce", "unsupervised_clusters",
    "ClusterBasis", "DiscreteMeasure", "SupportError", "gauss_on_measure", "reduce_basis",
    "NotPositiveDefiniteError", "solve_gsym",
    "ColumnSpec", "Sample", "parse_column_spec", "read_sample", "write_evaluation",
    "ProductBasis", "ProductLimitError", "expand",
    "RegularizedBasis", "regularize",
    "Evaluation", "LebesgueQuadrature", "build_gram", "evaluate", "evaluate_rows",
    "lebesgue_quadrature",
]
