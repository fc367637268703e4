"""Joint spectral radius relative to a generalized Schur product, and contraction certificates.

The spectral data of a matrix ``Y`` under a product is that of its left-regular
matrix on ``tensor_conj(A, B)``; that representation is a faithful unital algebra
map, so ``||Y^{*k}||^{1/k}`` and the left-regular norms grow at the same rate.
For a tuple ``Y_1..Y_d`` the classical word bounds are used:

    max_{|w| <= L} rho(L_w)^{1/|w|}  <=  JSR  <=  min_{l <= L} max_{|w| = l} ||L_w||^{1/l}

Products built by :func:`gschur.product.sum_product` carry corners; their
left-regular matrices are block diagonal over those corners, so both bounds are
taken corner by corner.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .product import GeneralizedSchurProduct, ShapeError, as_tuple, sum_product

DEFAULT_WORD_LENGTH = 8
DEFAULT_MAX_WORDS = 2**20
DEFAULT_GRID = tuple(round(0.1 * k, 1) for k in range(1, 11))
EXACT_NORM_MAX_DIM = 100


class WordCountError(ValueError):
    pass


class Verdict(str, enum.Enum):
    CERTIFIED = "CERTIFIED"
    REFUTED = "REFUTED"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class JsrEstimate:
    lower: float
    upper: float
    word_length: int
    norm: str
    best_length: int = 1
    first_level: float = math.inf  # max_i ||L_{Y_i}||, used by tail bounds
    lower_computed: bool = True

    def __post_init__(self):
        if self.lower < 0 or self.upper < 0:
            raise ValueError("JSR bounds are nonnegative")
        if self.lower > self.upper + 1e-12:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    def to_dict(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "word_length": self.word_length,
            "norm": self.norm,
            "best_length": self.best_length,
            "first_level": self.first_level,
            "lower_computed": self.lower_computed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "JsrEstimate":
        return cls(**d)


def components(gsp: GeneralizedSchurProduct):
    """``(rows, cols, product)`` triples over which left-regular matrices are block diagonal."""
    if gsp.corners:
        return [(c.rows, c.cols, c.product) for c in gsp.corners]
    return [(slice(None), slice(None), gsp)]


def _norm_fn(norm: str, dim: int):
    if norm == "auto":
        norm = "2" if dim <= EXACT_NORM_MAX_DIM else "holder"
    if norm == "2":
        return norm, lambda L: float(np.linalg.norm(L, 2)) if L.size else 0.0
    if norm == "holder":
        # sqrt(||L||_1 ||L||_inf) bounds the spectral norm from above
        def holder(L):
            a = np.abs(L)
            return float(math.sqrt(a.sum(axis=0).max(initial=0.0) * a.sum(axis=1).max(initial=0.0)))
        return norm, holder
    raise ValueError(f"unknown norm {norm!r}")


def _spectral_radius(L: np.ndarray) -> float:
    if not L.any():
        return 0.0
    return float(np.abs(np.linalg.eigvals(L)).max())


def star_spectral_radius(gsp: GeneralizedSchurProduct, Y) -> float:
    Y = gsp.check_shape(Y)
    return max(_spectral_radius(c.left_regular(Y[r, k])) for r, k, c in components(gsp))


def _word_count(d: int, L: int) -> int:
    return sum(d**k for k in range(1, L + 1))


def jsr_bounds(gsp: GeneralizedSchurProduct, Ys, max_word_length: int = DEFAULT_WORD_LENGTH,
               norm: str = "2", max_words: int = DEFAULT_MAX_WORDS,
               stop_below: Optional[float] = None, with_lower: bool = True) -> JsrEstimate:
    """Word-enumeration bounds on the joint spectral radius of ``Ys`` under ``gsp``.

    With ``stop_below`` set, enumeration stops at the first length whose upper
    bound drops below it.  ``with_lower=False`` skips the eigenvalue computations.
    """
    Ys = as_tuple(gsp, Ys)
    if max_word_length < 1:
        raise ValueError("max_word_length must be >= 1")
    d = len(Ys)
    if _word_count(d, max_word_length) > max_words:
        raise WordCountError(f"{_word_count(d, max_word_length)} words exceed the cap {max_words}")
    comps = components(gsp)
    dim = max(c.n * c.m for _, _, c in comps)
    norm_label, norm_of = _norm_fn(norm, dim)
    letters = [[c.coefficients(Y[r, k]) for Y in Ys] for r, k, c in comps]
    buffers = [(np.zeros((c.n * c.m,) * 2, dtype=np.complex128), np.zeros((c.n * c.m,) * 2, dtype=np.bool_))
               if norm_label == "holder" and not with_lower else (None, None) for _, _, c in comps]

    lower, upper = 0.0, math.inf
    best, first_level = 1, math.inf
    level = [[c.unit_coefficients for _, _, c in comps]]
    reached = 0
    for ell in range(1, max_word_length + 1):
        level = [
            [c.multiply_coefficients(word[ci], letters[ci][i]) for ci, (_, _, c) in enumerate(comps)]
            for word in level for i in range(d)
        ]
        worst = 0.0
        for word in level:
            for ci, (_, _, c) in enumerate(comps):
                if norm_label == "holder" and not with_lower:
                    worst = max(worst, c.holder_bound_of_coefficients(word[ci], *buffers[ci]))
                    continue
                Lw = c.left_regular_of_coefficients(word[ci])
                worst = max(worst, norm_of(Lw))
                if with_lower:
                    lower = max(lower, _spectral_radius(Lw) ** (1.0 / ell))
        if ell == 1:
            first_level = worst
        bound = worst ** (1.0 / ell)
        if bound < upper:
            upper, best = bound, ell
        reached = ell
        if stop_below is not None and upper < stop_below:
            break
    lower = min(lower, upper)
    return JsrEstimate(lower, upper, reached, norm_label, best, first_level, with_lower)


# ---------------------------------------------------------------------------
# contractions


def block_product(gsp: GeneralizedSchurProduct) -> GeneralizedSchurProduct:
    """Product on ``(m+n)``-square matrices with algebra ``B ⊕ A`` on both sides.

    The column algebra comes first, so in ``[[A, X^*], [X, B]]`` the top-left block is
    ``m x m`` and the ``n x m`` block ``X`` keeps the original product.
    """
    side = [(gsp.alg_b, gsp.vb), (gsp.alg_a, gsp.va)]
    return sum_product(side, side, validate=False)


def block_matrix(A, B, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.complex128)
    n, m = X.shape
    A = np.asarray(A, dtype=np.complex128)
    B = np.asarray(B, dtype=np.complex128)
    if A.shape != (m, m) or B.shape != (n, n):
        raise ShapeError(f"need A {(m, m)} and B {(n, n)} for X of shape {X.shape}")
    return np.block([[A, X.conj().T], [X, B]])


def block_embed(gsp: GeneralizedSchurProduct, A, B, X, block: Optional[GeneralizedSchurProduct] = None):
    """``([[A, X^*], [X, B]], block product)``."""
    X = gsp.check_shape(X)
    return block_matrix(A, B, X), (block or block_product(gsp))


def min_eig(H: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian part."""
    H = np.asarray(H)
    return float(np.linalg.eigvalsh((H + H.conj().T) / 2).min())


@dataclass
class ContractionCertificate:
    A: np.ndarray
    B: np.ndarray
    min_eigs: list
    jsr: Optional[JsrEstimate]
    verdict: Verdict
    tol: float = 1e-10
    note: str = ""

    @property
    def valid(self) -> bool:
        return (self.jsr is not None and all(e > self.tol for e in self.min_eigs)
                and self.jsr.upper < 1.0)

    def to_dict(self) -> dict:
        from .io import encode_matrix

        return {
            "A": encode_matrix(self.A),
            "B": encode_matrix(self.B),
            "min_eigs": list(self.min_eigs),
            "jsr": None if self.jsr is None else self.jsr.to_dict(),
            "verdict": self.verdict.value,
            "tol": self.tol,
            "note": self.note,
        }


def certify_contraction(gsp: GeneralizedSchurProduct, Xs, A, B,
                        max_word_length: int = DEFAULT_WORD_LENGTH, tol: float = 1e-10,
                        norm: str = "auto", refute: bool = True,
                        block: Optional[GeneralizedSchurProduct] = None) -> ContractionCertificate:
    """Check that one shared ``(A, B)`` makes every ``[[A, X_i^*], [X_i, B]]`` positive
    definite with block-tuple JSR below 1.

    ``refute=False`` skips the lower bound, so failures come back INCONCLUSIVE
    rather than REFUTED; the grid search uses that to stay cheap.
    """
    Xs = as_tuple(gsp, Xs)
    block = block or block_product(gsp)
    blocks = [block_matrix(A, B, X) for X in Xs]
    eigs = [min_eig(Y) for Y in blocks]
    A = np.asarray(A, dtype=np.complex128)
    B = np.asarray(B, dtype=np.complex128)
    if min(eigs) <= tol:
        return ContractionCertificate(A, B, eigs, None, Verdict.REFUTED, tol, "block not positive definite")
    est = jsr_bounds(block, blocks, max_word_length, norm=norm, stop_below=1.0, with_lower=False)
    if est.upper < 1.0:
        return ContractionCertificate(A, B, eigs, est, Verdict.CERTIFIED, tol)
    if not refute:
        return ContractionCertificate(A, B, eigs, est, Verdict.INCONCLUSIVE, tol, "bounds not below 1")
    est = jsr_bounds(block, blocks, max_word_length, norm=norm)
    verdict = Verdict.REFUTED if est.lower >= 1.0 else Verdict.INCONCLUSIVE
    note = "joint spectral radius >= 1" if verdict is Verdict.REFUTED else "bounds straddle 1"
    return ContractionCertificate(A, B, eigs, est, verdict, tol, note)


def _candidate_pairs(gsp: GeneralizedSchurProduct, grid: Sequence[float]):
    m, n = gsp.m, gsp.n
    eye_m, eye_n = np.eye(m), np.eye(n)
    for a in grid:
        yield a * eye_m, a * eye_n
    # the diagonal blocks of the block identity, made definite
    pa = np.outer(gsp.vb @ gsp.alg_b.unit, (gsp.vb @ gsp.alg_b.unit).conj())
    pb = np.outer(gsp.va @ gsp.alg_a.unit, (gsp.va @ gsp.alg_a.unit).conj())
    pa = pa / max(np.linalg.norm(pa, 2), 1e-300)
    pb = pb / max(np.linalg.norm(pb, 2), 1e-300)
    for a in grid:
        yield a * (eye_m + pa) / 2, a * (eye_n + pb) / 2


def search_contraction_witness(gsp: GeneralizedSchurProduct, Xs, grid: Sequence[float] = DEFAULT_GRID,
                               max_word_length: int = DEFAULT_WORD_LENGTH, tol: float = 1e-10,
                               norm: str = "auto") -> ContractionCertificate:
    """First certified candidate ``(A, B)`` from scaled identities, then scaled identity blocks."""
    Xs = as_tuple(gsp, Xs)
    block = block_product(gsp)
    best = None
    for A, B in _candidate_pairs(gsp, list(grid)):
        cert = certify_contraction(gsp, Xs, A, B, max_word_length, tol, norm, refute=False, block=block)
        if cert.verdict is Verdict.CERTIFIED:
            return cert
        if best is None or _score(cert) < _score(best):
            best = cert
    if best is None:
        z = ContractionCertificate(np.zeros((gsp.m, gsp.m)), np.zeros((gsp.n, gsp.n)), [], None,
                                   Verdict.INCONCLUSIVE, tol, "empty grid")
        return z
    return replace(best, verdict=Verdict.INCONCLUSIVE, note="no candidate certified: " + best.note)


def _score(cert: ContractionCertificate) -> float:
    if cert.jsr is None:
        return math.inf
    return cert.jsr.upper


def perturbation_radius(gsp: GeneralizedSchurProduct, Xs, cert: ContractionCertificate) -> float:
    """Radius ``delta`` such that every ``X_i + H_i`` with ``||H_i||_F <= delta`` stays certified
    by the same ``(A, B)`` at the certificate's best word length (exact 2-norm bounds).

    Uses ``lambda_min`` moving by at most ``||H||_2`` and, for a word of length ``l``,
    ``||prod (L_t + D_t)|| <= ||prod L_t|| + (M + eta)^l - M^l`` with ``M`` the largest
    letter norm and ``eta`` a bound on ``||D_t||``.
    """
    if not cert.valid or cert.jsr.norm != "2":
        return 0.0
    Xs = as_tuple(gsp, Xs)
    margin_pd = min(cert.min_eigs) - cert.tol
    ell = cert.jsr.best_length
    qpow = cert.jsr.upper ** ell
    M = cert.jsr.first_level
    # eta with (M + eta)^l - M^l <= (1 - q^l) / 2
    eta = (M**ell + (1.0 - qpow) / 2) ** (1.0 / ell) - M
    # ||L_{block(H)}|| <= kappa ||H||_F: only the two off-diagonal corners see H
    block = block_product(gsp)
    kappa = 0.0
    for r, k, c in components(block):
        if (r.start == 0) == (k.start == 0):
            continue
        ranges = np.linalg.norm(c.va_inv, 2) * np.linalg.norm(c.vb_inv_h, 2)
        frob = 0.0
        for i in range(c.n):
            for j in range(c.m):
                T = np.zeros((c.n, c.m), dtype=np.complex128)
                T[i, j] = 1.0
                frob += np.linalg.norm(c.left_regular_of_coefficients(T), 2) ** 2
        kappa = max(kappa, ranges * math.sqrt(frob))
    delta_jsr = eta / kappa if kappa > 0 else math.inf
    return float(max(0.0, min(margin_pd, delta_jsr)))
