"""Positivity preservation of power series: sampling tests and constructive refutation.

A series with a negative coefficient ``c_a`` is refuted on the truncated free
algebra of degree ``D = deg f``: with ``X_i = (eps e_{x_i})(eps e_{x_i})^*`` under its
saropp, ``X^w = eps^{2|w|} e_{x^w} e_{x^w}^*``, so ``f(X)`` is diagonal in the monomial
basis with entry ``c_w eps^{2|w|}`` at word ``w``, and is not positive semidefinite.

``eps`` is halved until the tuple is a certified Schur spectral contraction (a
witness outside that domain refutes nothing) or reaches :data:`EPS_FLOOR`.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .algebra import truncated_free_algebra
from .product import GeneralizedSchurProduct, as_tuple, saropp_from
from .series import NcPowerSeries, Word, eval_series, word_key
from .spectral import (
    DEFAULT_GRID,
    DEFAULT_WORD_LENGTH,
    ContractionCertificate,
    Verdict,
    certify_contraction,
    min_eig,
    search_contraction_witness,
)

log = logging.getLogger(__name__)

EPS_FLOOR = 2.0**-20


class PositivityError(ValueError):
    pass


class ComplexCoefficientError(PositivityError):
    pass


class NotNegativeError(PositivityError):
    pass


def _require_real(series: NcPowerSeries, tol: float = 0.0) -> None:
    bad = [w for w, c in series.coeffs.items() if abs(c.imag) > tol]
    if bad:
        raise ComplexCoefficientError(f"coefficient at word {bad[0]} is not real; positivity is undefined")


def scan_negative_coefficients(series: NcPowerSeries, tol: float = 1e-12) -> list[Word]:
    _require_real(series)
    return sorted((w for w, c in series.coeffs.items() if c.real < -tol), key=word_key)


# ---------------------------------------------------------------------------
# sampling


@dataclass
class SampledTuple:
    product_index: int
    sample_id: int
    seed: int
    scale: float
    Xs: tuple
    certificate: ContractionCertificate

    @property
    def certified(self) -> bool:
        return self.certificate.verdict is Verdict.CERTIFIED


def sample_contraction_tuples(products: Sequence[GeneralizedSchurProduct], samples: int, num_vars: int,
                              seed: int = 0, max_word_length: int = 4,
                              grid: Sequence[float] = DEFAULT_GRID, max_halvings: int = 12):
    """Random PSD tuples ``X_i = G_i G_i^*``, scaled down until certified.

    Sample ``s`` uses product ``s mod len(products)`` and seed ``(seed, s)``.
    """
    out = []
    for s in range(samples):
        p = s % len(products)
        gsp = products[p]
        rng = np.random.default_rng([seed, s])
        n = gsp.n
        base = []
        for _ in range(num_vars):
            G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            X = G @ G.conj().T
            base.append(X / np.linalg.norm(X, 2))
        scale = 0.5
        cert = None
        for _ in range(max_halvings):
            Xs = tuple(scale * X for X in base)
            cert = search_contraction_witness(gsp, Xs, grid, max_word_length)
            if cert.verdict is Verdict.CERTIFIED:
                break
            scale /= 2
        out.append(SampledTuple(p, s, seed, scale, Xs, cert))
    return out


@dataclass
class PositivityReport:
    samples: int
    min_eigenvalue_seen: float
    failures: list = field(default_factory=list)
    uncertified: list = field(default_factory=list)
    seed: int = 0

    @property
    def verdict(self) -> str:
        return "violated" if self.failures else "consistent"

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "min_eigenvalue_seen": self.min_eigenvalue_seen,
            "failures": [{"sample": s, "seed": sd, "min_eig": e} for s, sd, e in self.failures],
            "uncertified_samples": list(self.uncertified),
            "verdict": self.verdict,
        }


def evaluate_positivity(series: NcPowerSeries, tuples, products, tol: float = 1e-8,
                        seed: int = 0) -> PositivityReport:
    _require_real(series)
    lowest = np.inf
    failures, uncertified = [], []
    for t in tuples:
        if not t.certified:
            uncertified.append(t.sample_id)
            continue
        F = eval_series(series, products[t.product_index], t.Xs)
        e = min_eig(F)
        scale = max(1.0, float(np.linalg.norm(F, 2)))
        lowest = min(lowest, e)
        if e < -tol * scale:
            failures.append((t.sample_id, t.seed, e))
    if lowest == np.inf:
        lowest = 0.0
    return PositivityReport(len(tuples), float(lowest), failures, uncertified, seed)


def test_positivity_preserving(series: NcPowerSeries, products: Sequence[GeneralizedSchurProduct],
                               samples: int = 100, tol: float = 1e-8, seed: int = 0,
                               max_word_length: int = 4) -> PositivityReport:
    """Sample certified PSD contraction tuples on each saropp and look for ``f(X) < 0``."""
    _require_real(series)
    for g in products:
        if not g.is_saropp:
            raise PositivityError("positivity testing needs saropps (A = B, VA = VB)")
    tuples = sample_contraction_tuples(products, samples, series.num_vars, seed, max_word_length)
    return evaluate_positivity(series, tuples, products, tol, seed)


test_positivity_preserving.__test__ = False  # not a pytest test despite the name


# ---------------------------------------------------------------------------
# witnesses


@dataclass
class SchoenbergWitness:
    gsp: GeneralizedSchurProduct
    Xs: tuple
    epsilon: float
    negative_word: Word
    certificate: ContractionCertificate
    min_eig_of_fX: float
    at_floor: bool = False
    max_word_length: int = DEFAULT_WORD_LENGTH

    @property
    def certified(self) -> bool:
        return self.certificate.verdict is Verdict.CERTIFIED


def witness_tuple(num_vars: int, degree: int, epsilon: float):
    alg, index = truncated_free_algebra(num_vars, degree)
    gsp = saropp_from(alg)
    Xs = []
    for i in range(1, num_vars + 1):
        e = np.zeros(alg.dim)
        e[index.index((i,))] = epsilon
        Xs.append(np.outer(e, e).astype(np.complex128))
    return gsp, index, tuple(Xs)


def diagonal_oracle(series: NcPowerSeries, degree: int, epsilon: float) -> np.ndarray:
    """Closed form ``sum_w c_w eps^{2|w|} e_w e_w^T`` of ``f`` on the witness tuple."""
    _, index = truncated_free_algebra(series.num_vars, degree)
    diag = np.zeros(len(index), dtype=np.complex128)
    for w, c in series.coeffs.items():
        if len(w) <= degree:
            diag[index.index(w)] += c * epsilon ** (2 * len(w))
    return np.diag(diag)


def build_witness(series: NcPowerSeries, negative_word: Sequence[int], epsilon: float = 1.0,
                  max_word_length: int = DEFAULT_WORD_LENGTH,
                  grid: Sequence[float] = DEFAULT_GRID, floor: float = EPS_FLOOR) -> SchoenbergWitness:
    _require_real(series)
    a = tuple(negative_word)
    if not a:
        raise NotNegativeError("the negative word must be nonempty")
    if not series.coeff(a).real < 0:
        raise NotNegativeError(f"coefficient at {a} is {series.coeff(a).real}, not negative")
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    eps = epsilon
    at_floor = False
    while True:
        gsp, _, Xs = witness_tuple(series.num_vars, series.degree, eps)
        cert = search_contraction_witness(gsp, Xs, grid, max_word_length)
        if cert.verdict is Verdict.CERTIFIED:
            break
        if eps / 2 < floor:
            at_floor = True
            log.warning("witness certification reached the epsilon floor at %g", eps)
            break
        eps /= 2
    F = eval_series(series, gsp, Xs)
    return SchoenbergWitness(gsp, Xs, eps, a, cert, min_eig(F), at_floor, max_word_length)


def verify_witness(w: SchoenbergWitness, series: NcPowerSeries, tol: float = 1e-12) -> bool:
    """Independent recheck: PSD inputs, generic evaluation negative, certificate reproduces."""
    if any(min_eig(X) < -tol for X in w.Xs):
        return False
    if any(np.abs(X - X.conj().T).max() > tol for X in w.Xs):
        return False
    F = eval_series(series, w.gsp, w.Xs)
    if not min_eig(F) < -tol:
        return False
    cert = certify_contraction(w.gsp, w.Xs, w.certificate.A, w.certificate.B,
                               w.max_word_length, w.certificate.tol, refute=False)
    return cert.verdict is Verdict.CERTIFIED
