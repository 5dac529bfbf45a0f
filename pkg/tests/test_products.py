import numpy as np
import pytest

from rnspectral.products import (MultiIndex, ProductBasis, ProductLimitError, count_products,
                                 expand, multi_indices)
from rnspectral.regularizer import regularize
from rnspectral.spectral import build_gram, lebesgue_quadrature
from oracles import random_invertible


@pytest.mark.parametrize("n,D,N", [(7, 7, 1716), (8, 7, 3432), (5, 1, 5), (5, 2, 15), (1, 9, 1)])
def test_counts(n, D, N):
    assert count_products(n, D) == N
    assert len(multi_indices(n, D)) == N


def test_count_errors():
    with pytest.raises(ValueError):
        count_products(0, 2)


def test_degree_one_identity(rng):
    X = rng.normal(size=(6, 3))
    np.testing.assert_array_equal(expand(X, 1), X)


def test_two_attributes_plus_constant(rng):
    X = np.column_stack([np.ones(10), rng.normal(size=10), rng.normal(size=10)])
    E = expand(X, 2)
    one, x, y = X.T
    oracle = {
        (2, 0, 0): one * one, (1, 1, 0): one * x, (1, 0, 1): one * y,
        (0, 2, 0): x * x, (0, 1, 1): x * y, (0, 0, 2): y * y,
    }
    idx = multi_indices(3, 2)
    assert E.shape == (10, 6)
    assert {m.k for m in idx} == set(oracle)
    for col, m in enumerate(idx):
        np.testing.assert_array_equal(E[:, col], oracle[m.k])


def test_values_match_power_products(rng):
    X = rng.uniform(0.5, 1.5, size=(5, 4))
    for col, m in zip(expand(X, 3).T, multi_indices(4, 3)):
        np.testing.assert_allclose(col, np.prod(X ** np.array(m.k), axis=1), rtol=1e-14)
        assert m.degree == 3


def test_order_is_deterministic():
    ks = [m.k for m in multi_indices(3, 2)]
    assert ks == sorted(ks, reverse=True)
    assert str(MultiIndex((1, 0, 2))) == "x^(1,0,2)"


def test_cap():
    with pytest.raises(ProductLimitError):
        expand(np.ones((2, 8)), 8)
    assert expand(np.ones((2, 8)), 8, max_products=10 ** 5).shape == (2, 6435)


def test_single_attribute_degree_six_spans_powers(rng):
    from types import SimpleNamespace
    x = rng.uniform(-1, 1, 300)
    s = SimpleNamespace(x=x[:, None], f=1 / (1 + 25 * x ** 2), w=np.full(300, 2 / 300))
    s7 = SimpleNamespace(x=np.vander(x, 7, increasing=True), f=s.f, w=s.w)
    b = regularize(s, "EV")
    pb = regularize(s, "EV", ProductBasis(b, 6))
    q1 = lebesgue_quadrature(build_gram(s, pb))
    q2 = lebesgue_quadrature(build_gram(s7, regularize(s7, "EV")))
    np.testing.assert_allclose(q1.nodes, q2.nodes, atol=1e-9)
    np.testing.assert_allclose(q1.weights, q2.weights, atol=1e-9)


def test_remap_before_products_is_invisible(rng):
    from types import SimpleNamespace
    M = 200
    x = rng.normal(size=(M, 2))
    f = np.tanh(x[:, 0] * x[:, 1]) + 0.1 * rng.normal(size=M)
    w = np.ones(M)
    T = random_invertible(rng, 2)
    out = []
    for xx in (x, x @ T):
        s = SimpleNamespace(x=xx, f=f, w=w)
        b = regularize(s, "EV", ProductBasis(regularize(s, "EV"), 3))
        q = lebesgue_quadrature(build_gram(s, b))
        out.append((q.nodes, q.weights))
    np.testing.assert_allclose(out[0][0], out[1][0], rtol=1e-6, atol=1e-9)
    np.testing.assert_allclose(out[0][1], out[1][1], rtol=1e-6, atol=1e-7)


def test_product_basis_dim(rng):
    from types import SimpleNamespace
    s = SimpleNamespace(x=rng.normal(size=(50, 2)), w=np.ones(50))
    pb = ProductBasis(regularize(s, "EV"), 4)
    assert pb.dim == count_products(3, 4) == pb.apply(s.x).shape[1]
    np.testing.assert_allclose(pb.apply(s.x[0]), pb.apply(s.x)[0])
