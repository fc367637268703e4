import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gschur.algebra import cyclic_group_algebra, entrywise, truncated_free_algebra
from gschur.product import ShapeError, hadamard, make_product, saropp_from
from gschur.series import (
    NcPowerSeries,
    all_words,
    block_functoriality_check,
    difference_quotient,
    eval_naive,
    eval_series,
    from_scalar_series,
    homomorphism_equivariance_check,
    tail_bound,
    truncation_map,
)
from gschur.spectral import jsr_bounds
from gschur.zoo import zoo_products

from conftest import crandn, rel_err

PRODUCTS = zoo_products()


def random_series(rng, d, D, real=False):
    coeffs = {}
    for w in all_words(d, D):
        if rng.random() < 0.7:
            c = rng.standard_normal()
            coeffs[w] = c if real else c + 1j * rng.standard_normal()
    return NcPowerSeries(d, coeffs)


def test_series_basics():
    s = NcPowerSeries(2, {(2, 1): 1.0, (): 2.0, (1,): -1.0})
    assert s.words == [(), (1,), (2, 1)]
    assert s.degree == 2 and s.coeff((1, 2)) == 0 and s.is_real
    with pytest.raises(ValueError):
        NcPowerSeries(1, {(2,): 1.0})
    assert (s + s) == 2 * s
    assert s.truncated(1).degree == 1
    assert s.with_coeff((1, 2), 3).coeff((1, 2)) == 3


def test_from_scalar_series():
    assert len(from_scalar_series([1] * 7).coeffs) == 7
    e = from_scalar_series([1 / math.factorial(k) for k in range(5)])
    assert e.coeff((1, 1, 1)) == pytest.approx(1 / 6)
    f = from_scalar_series([0, 1, -1])
    assert f.coeff((1,)) == 1 and f.coeff((1, 1)) == -1


def test_eval_examples(rng):
    h = hadamard(3, 3)
    X = crandn(rng, 3, 3)
    np.testing.assert_allclose(eval_series(NcPowerSeries(1, {(1,): 1.0}), h, [X]), X, atol=1e-15)
    r, cs = 0.4, [1.0, 0.5, -0.25, 0.125]
    F = eval_series(from_scalar_series(cs), h, [r * np.ones((3, 3))])
    np.testing.assert_allclose(F, sum(c * r**k for k, c in enumerate(cs)) * np.ones((3, 3)), rtol=1e-14)
    g = saropp_from(truncated_free_algebra(1, 2)[0])
    e = np.eye(3)[1]
    F = eval_series(from_scalar_series([2.0, 3.0, -5.0]), g, [np.outer(e, e)])
    np.testing.assert_array_equal(F, np.diag([2.0, 3.0, -5.0]))


def test_eval_shape_errors():
    h = hadamard(2, 2)
    with pytest.raises(ShapeError):
        eval_series(NcPowerSeries(2, {(1,): 1}), h, [np.eye(2)])
    with pytest.raises(ShapeError):
        eval_series(NcPowerSeries(1, {(1,): 1}), h, [np.eye(3)])


@pytest.mark.parametrize("name", PRODUCTS)
def test_linearity_and_memo(name, rng):
    g = PRODUCTS[name]
    for d in (1, 2):
        f, k = random_series(rng, d, 4), random_series(rng, d, 3)
        Xs = [0.3 * crandn(rng, *g.shape) / np.sqrt(g.n * g.m) for _ in range(d)]
        a, b = 0.7 - 0.2j, 1.3
        lhs = eval_series(a * f + b * k, g, Xs)
        rhs = a * eval_series(f, g, Xs) + b * eval_series(k, g, Xs)
        assert rel_err(lhs, rhs) <= 1e-11
        assert rel_err(eval_series(f, g, Xs), eval_naive(f, g, Xs)) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_hadamard_entrywise_polynomial(seed):
    rng = np.random.default_rng(seed)
    cs = rng.standard_normal(5)
    X = crandn(rng, 3, 4)
    expect = np.polynomial.polynomial.polyval(X, cs)
    assert rel_err(eval_series(from_scalar_series(cs), hadamard(3, 4), [X]), expect) <= 1e-11


def test_block_functoriality(rng):
    f = random_series(rng, 2, 3)
    h = hadamard(2, 2)
    Xa, Xb = [crandn(rng, 2, 2) for _ in range(2)], [crandn(rng, 2, 2) for _ in range(2)]
    assert block_functoriality_check(f, h, h, Xa, Xb).deviation <= 1e-13
    g = saropp_from(cyclic_group_algebra(3))
    Xc = [0.3 * crandn(rng, 3, 3) for _ in range(2)]
    assert block_functoriality_check(f, make_product(entrywise(2), entrywise(2)), g, Xa, Xc).passed
    assert block_functoriality_check(NcPowerSeries(2, {}), h, g, Xa, Xc).deviation == 0


def test_difference_quotient(rng):
    h = hadamard(3, 3)
    X, H = crandn(rng, 3, 3), crandn(rng, 3, 3)
    ident = NcPowerSeries(1, {(1,): 1.0})
    np.testing.assert_allclose(difference_quotient(ident, h, [X], [H], 1), H, atol=1e-14)
    quad = from_scalar_series([1.0, -2.0, 3.0])
    assert np.abs(difference_quotient(quad, h, [X], [H], 3)).max() <= 1e-12
    # third difference of x^3 is 6 H^3 entrywise
    cube = from_scalar_series([0, 0, 0, 1.0])
    np.testing.assert_allclose(difference_quotient(cube, h, [X], [H], 3), 6 * H**3, atol=1e-10)
    with pytest.raises(ValueError):
        difference_quotient(ident, h, [X], [H], 0)


def test_difference_quotient_psd(rng):
    h = hadamard(3, 3)
    geo = from_scalar_series([1.0] * 6)
    for _ in range(10):
        G, K = crandn(rng, 3, 3), crandn(rng, 3, 3)
        X, H = G @ G.conj().T, K @ K.conj().T
        X, H = 0.3 * X / np.abs(X).max(), 0.1 * H / np.abs(H).max()
        for k in (1, 3):
            D = difference_quotient(geo, h, [X], [H], k)
            assert np.linalg.eigvalsh((D + D.conj().T) / 2)[0] >= -1e-8


def test_truncation_map():
    Pi = truncation_map(2, 2, 1)
    assert Pi.shape == (3, 7)
    np.testing.assert_array_equal(Pi[:, :3], np.eye(3))
    assert not Pi[:, 3:].any()


@pytest.mark.parametrize("d,D,Dp", [(1, 3, 2), (2, 3, 2), (2, 2, 1)])
def test_equivariance(d, D, Dp, rng):
    rep = homomorphism_equivariance_check(random_series(rng, d, 4, real=True), D, Dp)
    assert rep.passed, rep
    ident = NcPowerSeries(d, {(1,): 1.0})
    assert homomorphism_equivariance_check(ident, D, Dp).deviation <= 1e-15
    with pytest.raises(ValueError):
        homomorphism_equivariance_check(ident, 2, 2)


def test_tail_bound(rng):
    for name in ("hadamard_3x4", "cyclic4_random", "matrix2_saropp"):
        g = PRODUCTS[name]
        for d in (1, 2):
            Xs = [0.2 * crandn(rng, *g.shape) / np.sqrt(g.n * g.m) for _ in range(d)]
            est = jsr_bounds(g, Xs, 4)
            assert est.upper < 1
            f = random_series(rng, d, 4)
            for D in (1, 2, 3):
                gap = np.linalg.norm(eval_series(f, g, Xs, D + 1) - eval_series(f, g, Xs, D))
                assert gap <= tail_bound(f, g, D, est) * (1 + 1e-9) + 1e-14
