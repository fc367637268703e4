"""Noncommutative power series evaluated in a generalized Schur functional calculus.

Words are tuples of letters ``1..d``; the empty word is the constant term and
evaluates to the product's identity element.  Words are always processed in
length-then-lexicographic order, so floating-point results are reproducible.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .algebra import truncated_free_algebra
from .product import GeneralizedSchurProduct, ShapeError, as_tuple, direct_sum_product, saropp_from

Word = tuple[int, ...]


def word_key(w: Word):
    return (len(w), w)


@dataclass(frozen=True, eq=False)
class NcPowerSeries:
    num_vars: int
    coeffs: Mapping[Word, complex]

    def __post_init__(self):
        if self.num_vars < 1:
            raise ValueError("num_vars must be >= 1")
        clean = {}
        for w, c in self.coeffs.items():
            w = tuple(int(x) for x in w)
            if any(x < 1 or x > self.num_vars for x in w):
                raise ValueError(f"word {w} uses letters outside 1..{self.num_vars}")
            clean[w] = complex(c)
        object.__setattr__(self, "coeffs", dict(sorted(clean.items(), key=lambda kv: word_key(kv[0]))))

    @property
    def degree(self) -> int:
        return max((len(w) for w in self.coeffs), default=0)

    @property
    def words(self) -> list[Word]:
        return list(self.coeffs)

    def coeff(self, w: Sequence[int]) -> complex:
        return self.coeffs.get(tuple(w), 0j)

    @property
    def is_real(self) -> bool:
        return all(c.imag == 0 for c in self.coeffs.values())

    def __add__(self, other: "NcPowerSeries") -> "NcPowerSeries":
        d = max(self.num_vars, other.num_vars)
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0j) + c
        return NcPowerSeries(d, out)

    def __rmul__(self, scalar) -> "NcPowerSeries":
        return NcPowerSeries(self.num_vars, {w: scalar * c for w, c in self.coeffs.items()})

    def with_coeff(self, w: Sequence[int], c: complex) -> "NcPowerSeries":
        out = dict(self.coeffs)
        out[tuple(w)] = c
        return NcPowerSeries(self.num_vars, out)

    def truncated(self, degree: int) -> "NcPowerSeries":
        return NcPowerSeries(self.num_vars, {w: c for w, c in self.coeffs.items() if len(w) <= degree})

    def __eq__(self, other):
        if not isinstance(other, NcPowerSeries):
            return NotImplemented
        return self.num_vars == other.num_vars and self.coeffs == other.coeffs

    __hash__ = None


def from_scalar_series(coeffs: Sequence[complex]) -> NcPowerSeries:
    """One-variable series ``sum_k c_k x^k``."""
    return NcPowerSeries(1, {(1,) * k: c for k, c in enumerate(coeffs)})


def all_words(num_vars: int, degree: int):
    for k in range(degree + 1):
        yield from itertools.product(range(1, num_vars + 1), repeat=k)


def eval_series(series: NcPowerSeries, gsp: GeneralizedSchurProduct, Xs,
                max_degree: Optional[int] = None) -> np.ndarray:
    """``sum_{|w| <= max_degree} c_w X_{w_1} * ... * X_{w_k}`` with prefix-memoised monomials."""
    Xs = as_tuple(gsp, Xs)
    if len(Xs) != series.num_vars:
        raise ShapeError(f"series has {series.num_vars} variables, got {len(Xs)} matrices")
    top = series.degree if max_degree is None else max_degree
    letters = [gsp.coefficients(X) for X in Xs]
    memo = {(): gsp.unit_coefficients}

    def monomial(w):
        if w not in memo:
            memo[w] = gsp.multiply_coefficients(monomial(w[:-1]), letters[w[-1] - 1])
        return memo[w]

    total = np.zeros(gsp.shape, dtype=np.complex128)
    for w, c in series.coeffs.items():
        if len(w) > top or c == 0:
            continue
        total = total + c * monomial(w)
    return gsp.from_coefficients(total)


def eval_naive(series, gsp, Xs, max_degree=None):
    """Word-by-word evaluation through ``gsp.multiply``; reference path for tests."""
    Xs = as_tuple(gsp, Xs)
    top = series.degree if max_degree is None else max_degree
    total = np.zeros(gsp.shape, dtype=np.complex128)
    for w, c in series.coeffs.items():
        if len(w) > top:
            continue
        value = np.array(gsp.identity)
        for letter in w:
            value = gsp.multiply(value, Xs[letter - 1])
        total = total + c * value
    return total


@dataclass(frozen=True)
class CheckReport:
    deviation: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tol

    def to_dict(self) -> dict:
        return {"deviation": self.deviation, "tol": self.tol, "passed": self.passed}


def block_functoriality_check(series, gsp_a, gsp_b, Xs_a, Xs_b, tol: float = 1e-10) -> CheckReport:
    """Evaluate on block-diagonal ``diag(X_a, X_b)`` under the direct-sum product and
    compare the diagonal blocks to the separate evaluations."""
    Xs_a = as_tuple(gsp_a, Xs_a)
    Xs_b = as_tuple(gsp_b, Xs_b)
    if len(Xs_a) != len(Xs_b):
        raise ShapeError("tuples must have the same length")
    big = direct_sum_product(gsp_a, gsp_b)
    n1, m1 = gsp_a.shape
    blocks = []
    for Xa, Xb in zip(Xs_a, Xs_b):
        Z = np.zeros(big.shape, dtype=np.complex128)
        Z[:n1, :m1] = Xa
        Z[n1:, m1:] = Xb
        blocks.append(Z)
    F = eval_series(series, big, blocks)
    Fa = eval_series(series, gsp_a, Xs_a)
    Fb = eval_series(series, gsp_b, Xs_b)
    # off-diagonal corners see only zero blocks, so they hold f(0) = c_() times the identity there
    F0 = series.coeff(()) * big.identity
    dev = max(np.abs(F[:n1, :m1] - Fa).max(), np.abs(F[n1:, m1:] - Fb).max(),
              np.abs(F[:n1, m1:] - F0[:n1, m1:]).max(initial=0.0),
              np.abs(F[n1:, :m1] - F0[n1:, :m1]).max(initial=0.0))
    return CheckReport(float(dev), tol)


def difference_quotient(series, gsp, X, H, k: int) -> np.ndarray:
    """``sum_j (-1)^j C(k, j) f(X + (k - j) H)``; tuples are shifted componentwise."""
    if k < 1:
        raise ValueError("order must be >= 1")
    Xs = as_tuple(gsp, X)
    Hs = as_tuple(gsp, H)
    if len(Xs) != len(Hs):
        raise ShapeError("X and H must have the same number of components")
    total = np.zeros(gsp.shape, dtype=np.complex128)
    for j in range(k + 1):
        shift = k - j
        point = [x + shift * h for x, h in zip(Xs, Hs)]
        total = total + (-1) ** j * math.comb(k, j) * eval_series(series, gsp, point)
    return total


def truncation_map(num_vars: int, degree: int, target_degree: int) -> np.ndarray:
    """Coordinate matrix of the quotient ``free(d, D) -> free(d, D')``: keep words of length <= D'."""
    _, big = truncated_free_algebra(num_vars, degree)
    _, small = truncated_free_algebra(num_vars, target_degree)
    Pi = np.zeros((len(small), len(big)))
    for w in small.words:
        Pi[small.index(w), big.index(w)] = 1.0
    return Pi


def homomorphism_equivariance_check(series: NcPowerSeries, degree: int, target_degree: int,
                                    tol: float = 1e-10, epsilon: float = 0.5,
                                    seed: int = 0) -> CheckReport:
    """``f(Pi X Pi^T) == Pi f(X) Pi^T`` for the truncation quotient ``Pi``.

    ``X -> Pi X Pi^T`` is a unital homomorphism between the two truncated-free saropps.
    Checked on the rank-one monomial tuple ``X_i = eps^2 e_{x_i} e_{x_i}^T`` and on a
    random complex tuple.
    """
    if target_degree >= degree:
        raise ValueError("target degree must be smaller")
    d = series.num_vars
    alg, index = truncated_free_algebra(d, degree)
    alg_small, _ = truncated_free_algebra(d, target_degree)
    g_big = saropp_from(alg)
    g_small = saropp_from(alg_small)
    Pi = truncation_map(d, degree, target_degree)
    N = alg.dim
    witness = []
    for i in range(1, d + 1):
        e = np.zeros(N)
        e[index.index((i,))] = epsilon
        witness.append(np.outer(e, e))
    rng = np.random.default_rng(seed)
    generic = [0.3 * (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) for _ in range(d)]
    dev = 0.0
    for Xs in (witness, generic):
        lhs = eval_series(series, g_small, [Pi @ X @ Pi.T for X in Xs])
        rhs = Pi @ eval_series(series, g_big, Xs) @ Pi.T
        dev = max(dev, float(np.abs(lhs - rhs).max()))
    return CheckReport(dev, tol)


def tail_bound(series: NcPowerSeries, gsp: GeneralizedSchurProduct, degree: int, estimate) -> float:
    """Bound on ``||f_{D+1}(X) - f_D(X)||_F`` (the degree ``D+1`` homogeneous part).

    With ``q`` the JSR upper bound at its best length ``l`` and ``M`` the largest
    letter norm, every word of length ``D+1 = k l + r`` has ``||L_w|| <= q^{kl} M^r``;
    the bound is ``sup|c| d^{D+1} q^{kl} M^r ||VA|| ||VB|| ||unit||``.
    """
    top = degree + 1
    cs = [abs(c) for w, c in series.coeffs.items() if len(w) == top]
    if not cs:
        return 0.0
    ell = estimate.best_length
    k, r = divmod(top, ell)
    word_norm = (estimate.upper ** ell) ** k * estimate.first_level ** r
    C = (np.linalg.norm(gsp.va, 2) * np.linalg.norm(gsp.vb, 2)
         * np.linalg.norm(gsp.unit_coefficients))
    return float(max(cs) * series.num_vars**top * word_norm * C)
