"""Recognising rank-one preserving products and rebuilding them as generalized Schur products.

A raw bilinear product on ``n x m`` matrices is a dense tensor ``P`` of shape
``(nm, nm, nm)`` with ``vec(X * Y)[o] = sum_{l, r} P[o, l, r] vec(X)[l] vec(Y)[r]``,
``vec`` being column-major.

Reconstruction follows the constructive route: find the rank-one identity
``E = one @ one_star^H``; read a product on ``C^n`` off ``(v one_star^*) * (w one_star^*)``
and a product on ``C^m`` off ``(one v^*) * (one w^*)``; confirm the mixed law
``(v one_star^*) * (one w^*) = vw^*``; then the product is the generalized Schur
product of those two algebras with identity bijections.

Gauge: ``one`` has unit norm and its first non-negligible entry is real positive;
the scale of ``E`` is carried by ``one_star``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .algebra import StructureAlgebra, check_algebra
from .product import GeneralizedSchurProduct, ShapeError, make_product

DEFAULT_RANK_TOL = 1e-8
DEFAULT_TRIALS = 200


class RoppError(ValueError):
    pass


class NoIdentityError(RoppError):
    pass


class IdentityNotRankOneError(RoppError):
    pass


class NotRoppError(RoppError):
    def __init__(self, verdict: "RoppVerdict"):
        super().__init__(f"product is not rank-one preserving: {verdict.reason} ({verdict.value:.3e})")
        self.verdict = verdict


class FormViolationError(RoppError):
    def __init__(self, side: str, i: int, j: int, residual: float):
        super().__init__(f"{side} product of basis pair ({i}, {j}) leaves the expected form "
                         f"(residual {residual:.3e})")
        self.side, self.pair, self.residual = side, (i, j), residual


class MixedLawError(RoppError):
    pass


def vec(X: np.ndarray) -> np.ndarray:
    return np.asarray(X).reshape(-1, order="F")


def unvec(v: np.ndarray, n: int, m: int) -> np.ndarray:
    return np.asarray(v).reshape(n, m, order="F")


@dataclass(frozen=True, eq=False)
class BilinearProductTensor:
    n: int
    m: int
    data: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.data, dtype=np.complex128)
        N = self.n * self.m
        if P.shape != (N, N, N):
            raise ShapeError(f"tensor has shape {P.shape}, expected {(N, N, N)}")
        P.setflags(write=False)
        object.__setattr__(self, "data", P)

    @property
    def size(self) -> int:
        return self.n * self.m

    def apply(self, X, Y) -> np.ndarray:
        z = np.einsum("olr,l,r->o", self.data, vec(X), vec(Y))
        return unvec(z, self.n, self.m)

    def apply_batch(self, Xs: np.ndarray, Ys: np.ndarray) -> np.ndarray:
        """``Xs``, ``Ys`` of shape ``(t, n, m)``; returns the ``t`` products."""
        xs = Xs.transpose(0, 2, 1).reshape(len(Xs), -1)
        ys = Ys.transpose(0, 2, 1).reshape(len(Ys), -1)
        z = np.einsum("olr,tl,tr->to", self.data, xs, ys, optimize=True)
        return z.reshape(len(Xs), self.m, self.n).transpose(0, 2, 1)

    def perturbed(self, index: tuple[int, int, int], delta: complex) -> "BilinearProductTensor":
        P = self.data.copy()
        P[index] += delta
        return BilinearProductTensor(self.n, self.m, P)

    def __eq__(self, other):
        if not isinstance(other, BilinearProductTensor):
            return NotImplemented
        return self.n == other.n and self.m == other.m and np.array_equal(self.data, other.data)

    __hash__ = None


def matrix_multiplication_tensor(k: int) -> BilinearProductTensor:
    """Ordinary ``k x k`` matrix multiplication as a raw bilinear product."""
    N = k * k
    P = np.zeros((N, N, N), dtype=np.complex128)
    for a in range(k):
        for b in range(k):
            for d in range(k):
                # E_ab E_bd = E_ad, column-major index of (i, j) is i + k * j
                P[a + k * d, a + k * b, b + k * d] = 1.0
    return BilinearProductTensor(k, k, P)


@dataclass(frozen=True)
class IdentityFactorization:
    one: np.ndarray
    one_star: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return np.outer(self.one, self.one_star.conj())


def _second_singular_ratio(Z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s = np.linalg.svd(Z, compute_uv=False)
    s1 = s[..., 0]
    s2 = s[..., 1] if s.shape[-1] > 1 else np.zeros_like(s1)
    return s1, s2


def find_identity(P: BilinearProductTensor, rank_tol: float = DEFAULT_RANK_TOL,
                  tol: float = 1e-9) -> IdentityFactorization:
    N = P.size
    D = P.data
    target = np.eye(N).reshape(-1)
    left = D.transpose(0, 2, 1).reshape(N * N, N)   # sum_l D[o, l, r] e_l = delta_or
    right = D.reshape(N * N, N)                      # sum_r D[o, l, r] e_r = delta_ol
    M = np.vstack([left, right])
    rhs = np.concatenate([target, target])
    e, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    residual = float(np.abs(M @ e - rhs).max())
    if residual > tol:
        raise NoIdentityError(f"no two-sided identity (residual {residual:.3e})")
    E = unvec(e, P.n, P.m)
    U, s, Vh = np.linalg.svd(E)
    if len(s) > 1 and s[1] > rank_tol * s[0]:
        raise IdentityNotRankOneError(f"identity has rank > 1 (sigma2/sigma1 = {s[1] / s[0]:.3e})")
    one = U[:, 0]
    lead = np.flatnonzero(np.abs(one) > 1e-12 * np.abs(one).max())[0]
    one = one * (abs(one[lead]) / one[lead])
    one[lead] = one[lead].real  # drop the rounding residue so the phase is exactly zero
    return IdentityFactorization(one, E.conj().T @ one)


@dataclass
class RoppVerdict:
    passed: bool
    reason: str = "ok"
    value: float = 0.0
    counterexample: Optional[tuple[np.ndarray, ...]] = field(default=None, repr=False)
    checked_pairs: int = 0

    def to_dict(self) -> dict:
        from .io import encode_matrix

        out = {"passed": self.passed, "reason": self.reason, "value": self.value,
               "checked_pairs": self.checked_pairs}
        if self.counterexample is not None:
            out["counterexample"] = [encode_matrix(X) for X in self.counterexample]
        return out


def check_ropp(P: BilinearProductTensor, trials: int = DEFAULT_TRIALS, tol: float = DEFAULT_RANK_TOL,
               seed: int = 0, assoc_trials: int = 20, assoc_tol: float = 1e-9) -> RoppVerdict:
    """Search for a rank-one pair whose product has rank two, then for an associativity failure.

    Enumeration order is fixed: all pairs of matrix units, then ``trials`` Gaussian
    rank-one pairs, then ``assoc_trials`` Gaussian triples.  The first failure is returned.
    """
    n, m, N = P.n, P.m, P.size
    rng = np.random.default_rng(seed)
    checked = 0

    # pairs of matrix units: the product is the column P[:, l, r]
    Z = P.data.transpose(1, 2, 0).reshape(N * N, m, n).transpose(0, 2, 1)
    s1, s2 = _second_singular_ratio(Z)
    bad = np.flatnonzero(s2 > tol * np.maximum(s1, 1.0))
    checked += N * N
    if bad.size:
        l, r = divmod(int(bad[0]), N)
        X, Y = unvec(np.eye(N)[l], n, m), unvec(np.eye(N)[r], n, m)
        return RoppVerdict(False, "rank", float(s2[bad[0]]), (X, Y), checked)

    def rank_ones(t):
        a = rng.standard_normal((t, n)) + 1j * rng.standard_normal((t, n))
        b = rng.standard_normal((t, m)) + 1j * rng.standard_normal((t, m))
        return np.einsum("ti,tk->tik", a, b.conj())

    if trials > 0:
        Xs, Ys = rank_ones(trials), rank_ones(trials)
        s1, s2 = _second_singular_ratio(P.apply_batch(Xs, Ys))
        bad = np.flatnonzero(s2 > tol * np.maximum(s1, 1.0))
        if bad.size:
            t = int(bad[0])
            return RoppVerdict(False, "rank", float(s2[t]), (Xs[t], Ys[t]), checked + t + 1)
        checked += trials

    for _ in range(assoc_trials):
        X, Y, W = (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m)) for _ in range(3))
        lhs = P.apply(P.apply(X, Y), W)
        rhs = P.apply(X, P.apply(Y, W))
        err = float(np.abs(lhs - rhs).max() / max(1.0, np.abs(lhs).max()))
        if err > assoc_tol:
            return RoppVerdict(False, "associativity", err, (X, Y, W), checked)

    try:
        find_identity(P, rank_tol=tol)
    except RoppError as exc:
        return RoppVerdict(False, "identity: " + str(exc), 0.0, None, checked)
    return RoppVerdict(True, "ok", 0.0, None, checked)


def extract_row_algebra(P: BilinearProductTensor, idf: IdentityFactorization,
                        tol: float = DEFAULT_RANK_TOL) -> StructureAlgebra:
    """Product on ``C^n`` defined by ``(v one_star^*) * (w one_star^*) = (v.w) one_star^*``."""
    n, m = P.n, P.m
    s = idf.one_star
    U = np.stack([vec(np.outer(np.eye(n)[i], s.conj())) for i in range(n)])
    Z = np.einsum("olr,il,jr->ijo", P.data, U, U, optimize=True)
    Z = Z.reshape(n, n, m, n).transpose(0, 1, 3, 2)
    c = Z @ s / np.vdot(s, s).real
    fit = c[..., :, None] * s.conj()[None, None, None, :]
    _check_form(Z, fit, "row", tol)
    return StructureAlgebra(n, c, idf.one)


def extract_col_algebra(P: BilinearProductTensor, idf: IdentityFactorization,
                        tol: float = DEFAULT_RANK_TOL) -> StructureAlgebra:
    """Product on ``C^m`` defined by ``(one v^*) * (one w^*) = one (v.w)^*``."""
    n, m = P.n, P.m
    one = idf.one
    U = np.stack([vec(np.outer(one, np.eye(m)[k])) for k in range(m)])
    Z = np.einsum("olr,il,jr->ijo", P.data, U, U, optimize=True)
    Z = Z.reshape(m, m, m, n).transpose(0, 1, 3, 2)
    c = np.einsum("ijok,o->ijk", Z.conj(), one)
    fit = one[None, None, :, None] * c.conj()[..., None, :]
    _check_form(Z, fit, "column", tol)
    return StructureAlgebra(m, c, idf.one_star)


def _check_form(Z, fit, side, tol):
    res = np.abs(Z - fit).max(axis=(2, 3)) / np.maximum(1.0, np.abs(Z).max(axis=(2, 3)))
    if res.size and res.max() > tol:
        i, j = np.unravel_index(int(np.argmax(res)), res.shape)
        raise FormViolationError(side, int(i), int(j), float(res[i, j]))


@dataclass(frozen=True)
class MixedLawReport:
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol

    def to_dict(self) -> dict:
        return {"residual": self.residual, "tol": self.tol, "passed": self.passed}


def verify_mixed_law(P: BilinearProductTensor, idf: IdentityFactorization,
                     tol: float = DEFAULT_RANK_TOL) -> MixedLawReport:
    n, m = P.n, P.m
    V = np.stack([vec(np.outer(np.eye(n)[i], idf.one_star.conj())) for i in range(n)])
    W = np.stack([vec(np.outer(idf.one, np.eye(m)[k])) for k in range(m)])
    target = np.eye(n * m)  # vec(e_i e_k^T) at column-major index i + n k
    target = target.reshape(m, n, n * m).transpose(1, 0, 2)
    left = np.einsum("olr,il,kr->iko", P.data, V, W, optimize=True)
    right = np.einsum("olr,kl,ir->iko", P.data, W, V, optimize=True)
    residual = float(max(np.abs(left - target).max(), np.abs(right - target).max()))
    return MixedLawReport(residual, tol)


def reconstruct(P: BilinearProductTensor, trials: int = DEFAULT_TRIALS, seed: int = 0,
                tol: float = DEFAULT_RANK_TOL) -> GeneralizedSchurProduct:
    """Rebuild ``P`` as a generalized Schur product; raises unless every check passes.

    Sampling runs first so that a rejected tensor comes with its first counterexample.
    """
    verdict = check_ropp(P, trials=trials, tol=tol, seed=seed)
    if not verdict.passed and verdict.counterexample is not None:
        raise NotRoppError(verdict)
    idf = find_identity(P, rank_tol=tol)
    mixed = verify_mixed_law(P, idf, tol)
    if not mixed.passed:
        raise MixedLawError(f"mixed law residual {mixed.residual:.3e} exceeds {tol:.1e}")
    row = extract_row_algebra(P, idf, tol)
    col = extract_col_algebra(P, idf, tol)
    for name, alg in (("row", row), ("column", col)):
        scale = max(1.0, float(np.abs(alg.structure).max())) ** 2
        report = check_algebra(alg, tol * scale)
        if not report.passed:
            raise RoppError(f"extracted {name} algebra is not a unital associative algebra: "
                            f"{report.to_dict()}")
    gsp = make_product(row, col, validate=False)
    rebuilt = gsp.materialize().data
    err = float(np.abs(rebuilt - P.data).max() / max(1.0, np.abs(P.data).max()))
    if err > tol:
        raise RoppError(f"reconstructed product deviates from the tensor by {err:.3e}")
    return gsp
