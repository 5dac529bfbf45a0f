"""Product attributes: all monomials of a basis up to a total degree.

With a constant among the ``n`` input attributes, the monomials of degree
exactly ``D`` in those attributes span every monomial of degree ``<= D`` in
the non-constant ones; there are ``C(n + D - 1, D)`` of them.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import comb

import numpy as np

__all__ = [
    "MAX_PRODUCTS",
    "ProductLimitError",
    "MultiIndex",
    "count_products",
    "multi_indices",
    "expand",
    "ProductBasis",
]

MAX_PRODUCTS = 5000


class ProductLimitError(ValueError):
    """Requested expansion is too large to solve."""


@dataclass(frozen=True)
class MultiIndex:
    k: tuple

    @property
    def degree(self) -> int:
        return sum(self.k)

    def __str__(self):
        return "x^(" + ",".join(map(str, self.k)) + ")"


def count_products(n: int, D: int) -> int:
    """Number of product attributes, ``C(n + D - 1, D)``."""
    if n < 1 or D < 0:
        raise ValueError("need n >= 1 and D >= 0")
    return comb(n + D - 1, D)


def _combos(n, D):
    # nondecreasing index tuples; yields multi-indices in descending lex order
    return list(combinations_with_replacement(range(n), D))


def multi_indices(n: int, D: int) -> list[MultiIndex]:
    out = []
    for c in _combos(n, D):
        k = [0] * n
        for j in c:
            k[j] += 1
        out.append(MultiIndex(tuple(k)))
    return out


def expand(rows, D: int, max_products: int = MAX_PRODUCTS) -> np.ndarray:
    """All degree-``D`` monomials of the columns of ``rows``.

    Built recursively: each degree-d term is a degree-(d-1) term times one
    attribute.  For ``D = 1`` the input is returned unchanged.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    n = rows.shape[1]
    if D < 1:
        raise ValueError("degree must be >= 1")
    total = count_products(n, D)
    if total > max_products:
        raise ProductLimitError(
            f"{total} product attributes for n={n}, degree {D} exceed the cap of {max_products}")
    level = {(j,): rows[:, j] for j in range(n)}
    for _ in range(1, D):
        nxt = {}
        for c in _combos(n, len(next(iter(level))) + 1):
            nxt[c] = level[c[:-1]] * rows[:, c[-1]]
        level = nxt
    return np.column_stack([level[c] for c in _combos(n, D)])


@dataclass(frozen=True, eq=False)
class ProductBasis:
    """Feature map ``x -> expand(base.apply(x), degree)``."""

    base: object
    degree: int
    max_products: int = MAX_PRODUCTS

    @property
    def dim(self) -> int:
        return count_products(self.base.dim, self.degree)

    def apply(self, x):
        X = self.base.apply(x)
        single = X.ndim == 1
        out = expand(np.atleast_2d(X), self.degree, self.max_products)
        return out[0] if single else out
