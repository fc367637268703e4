"""Finite-dimensional unital associative algebras over the complex numbers.

An algebra is stored by its structure constants: ``e_i * e_j = sum_k c[i, j, k] e_k``.
Elements are plain complex coordinate vectors of length ``dim``.

Basis-ordering conventions used throughout the package:

* ``direct_sum(a1, a2)`` puts the basis of ``a1`` first (coordinates ``0..n1-1``).
* ``tensor_conj(a, b)`` pairs basis ``(i, k)`` to index ``i * b.dim + k``
  (row-major), and conjugates the structure constants of ``b``.
* ``matrix_algebra(k)`` uses matrix units ``E_ab`` at index ``a * k + b``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels

DEFAULT_TOL = 1e-10
DEFAULT_MAX_DIM = 10_000

Word = tuple[int, ...]


class AlgebraError(ValueError):
    """Invalid algebra data."""


class NotUnitalError(AlgebraError):
    pass


class DegenerateUnitError(AlgebraError):
    pass


class DimensionError(AlgebraError):
    pass


def _coo(structure: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    idx = np.argwhere(structure != 0).astype(np.int64)
    vals = structure[tuple(idx.T)].astype(np.complex128) if len(idx) else np.zeros(0, np.complex128)
    return np.ascontiguousarray(idx.reshape(-1, 3)), np.ascontiguousarray(vals)


@dataclass(frozen=True, eq=False)
class StructureAlgebra:
    dim: int
    structure: np.ndarray
    unit: np.ndarray
    labels: Optional[tuple[str, ...]] = None
    coo_index: np.ndarray = field(init=False, repr=False)
    coo_values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        c = np.asarray(self.structure, dtype=np.complex128)
        u = np.asarray(self.unit, dtype=np.complex128).reshape(-1)
        if c.shape != (self.dim, self.dim, self.dim):
            raise DimensionError(f"structure tensor has shape {c.shape}, expected {(self.dim,) * 3}")
        if u.shape != (self.dim,):
            raise DimensionError(f"unit has length {u.shape[0]}, expected {self.dim}")
        if self.labels is not None and len(self.labels) != self.dim:
            raise DimensionError("labels must have one entry per basis element")
        c.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "structure", c)
        object.__setattr__(self, "unit", u)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
        idx, vals = _coo(c)
        object.__setattr__(self, "coo_index", idx)
        object.__setattr__(self, "coo_values", vals)

    def element(self, coords) -> np.ndarray:
        a = np.asarray(coords, dtype=np.complex128).reshape(-1)
        if a.shape != (self.dim,):
            raise DimensionError(f"element has length {a.shape[0]}, algebra has dim {self.dim}")
        return a

    def basis(self, i: int) -> np.ndarray:
        e = np.zeros(self.dim, dtype=np.complex128)
        e[i] = 1.0
        return e

    def multiply(self, a, b) -> np.ndarray:
        return multiply_elements(self, a, b)

    def left_regular(self, a) -> np.ndarray:
        return left_regular_representation(self, a)

    def __eq__(self, other):
        if not isinstance(other, StructureAlgebra):
            return NotImplemented
        return (
            self.dim == other.dim
            and np.array_equal(self.structure, other.structure)
            and np.array_equal(self.unit, other.unit)
            and self.labels == other.labels
        )

    __hash__ = None


def make_algebra(structure, unit=None, labels=None, tol: float = DEFAULT_TOL) -> StructureAlgebra:
    """Build an algebra from a structure tensor, solving for the unit when it is omitted."""
    c = np.asarray(structure, dtype=np.complex128)
    if c.ndim != 3 or len(set(c.shape)) != 1:
        raise DimensionError(f"structure tensor must be cubic, got shape {c.shape}")
    if unit is None:
        unit = find_unit(c, tol=tol)
    return StructureAlgebra(c.shape[0], c, unit, labels)


def multiply_elements(alg: StructureAlgebra, a, b) -> np.ndarray:
    a = alg.element(a)
    b = alg.element(b)
    return kernels.algebra_multiply(alg.coo_index, alg.coo_values, a, b, alg.dim)


def left_regular_representation(alg: StructureAlgebra, a) -> np.ndarray:
    """Matrix ``L_a`` with ``L_a @ b == a * b``."""
    a = alg.element(a)
    return kernels.algebra_left_regular(alg.coo_index, alg.coo_values, a, alg.dim)


@dataclass(frozen=True)
class AlgebraReport:
    associativity_residual: float
    unit_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.associativity_residual <= self.tol and self.unit_residual <= self.tol

    def to_dict(self) -> dict:
        return {
            "associativity_residual": self.associativity_residual,
            "unit_residual": self.unit_residual,
            "tol": self.tol,
            "passed": self.passed,
        }


def _unit_residual(c: np.ndarray, u: np.ndarray) -> float:
    eye = np.eye(c.shape[0])
    left = np.einsum("i,ijk->jk", u, c)
    right = np.einsum("j,ijk->ik", u, c)
    return float(max(np.abs(left - eye).max(initial=0.0), np.abs(right - eye).max(initial=0.0)))


def check_algebra(alg: StructureAlgebra, tol: float = DEFAULT_TOL) -> AlgebraReport:
    c = alg.structure
    # (e_i e_j) e_k versus e_i (e_j e_k)
    lhs = np.einsum("ijp,pkq->ijkq", c, c, optimize=True)
    rhs = np.einsum("jkp,ipq->ijkq", c, c, optimize=True)
    assoc = float(np.abs(lhs - rhs).max(initial=0.0))
    return AlgebraReport(assoc, _unit_residual(c, alg.unit), tol)


def find_unit(structure, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Solve the two-sided unit law for an algebra given only by structure constants."""
    c = np.asarray(structure, dtype=np.complex128)
    n = c.shape[0]
    eye = np.eye(n).reshape(-1)
    # left law: sum_i u_i c[i, j, k] = delta_jk; right law: sum_j u_j c[i, j, k] = delta_ik
    left = c.reshape(n, n * n).T
    right = c.transpose(1, 0, 2).reshape(n, n * n).T
    M = np.vstack([left, right])
    rhs = np.concatenate([eye, eye])
    u, _, rank, _ = np.linalg.lstsq(M, rhs, rcond=None)
    residual = np.abs(M @ u - rhs).max(initial=0.0)
    if residual > tol:
        raise NotUnitalError(f"unit law has no solution (residual {residual:.3e})")
    if rank < n:
        raise DegenerateUnitError(f"unit law has a {n - rank}-dimensional solution family")
    return u


def direct_sum(a1: StructureAlgebra, a2: StructureAlgebra) -> StructureAlgebra:
    n1, n2 = a1.dim, a2.dim
    c = np.zeros((n1 + n2,) * 3, dtype=np.complex128)
    c[:n1, :n1, :n1] = a1.structure
    c[n1:, n1:, n1:] = a2.structure
    labels = None
    if a1.labels is not None and a2.labels is not None:
        labels = a1.labels + a2.labels
    return StructureAlgebra(n1 + n2, c, np.concatenate([a1.unit, a2.unit]), labels)


def tensor_conj(a: StructureAlgebra, b: StructureAlgebra) -> StructureAlgebra:
    """``a ⊗ conj(b)`` with basis pairing ``(i, k) -> i * b.dim + k``."""
    n, m = a.dim, b.dim
    c = np.einsum("ijp,klq->ikjlpq", a.structure, b.structure.conj()).reshape(n * m, n * m, n * m)
    labels = None
    if a.labels is not None and b.labels is not None:
        labels = tuple(f"{x}⊗{y}" for x in a.labels for y in b.labels)
    return StructureAlgebra(n * m, c, np.kron(a.unit, b.unit.conj()), labels)


# ---------------------------------------------------------------------------
# truncated free algebra


@dataclass(frozen=True)
class MonomialIndex:
    """Bidirectional map between words over ``{1..num_vars}`` and basis indices."""

    num_vars: int
    degree: int
    words: tuple[Word, ...]

    def __post_init__(self):
        object.__setattr__(self, "_lookup", {w: i for i, w in enumerate(self.words)})

    def index(self, word: Sequence[int]) -> int:
        return self._lookup[tuple(word)]

    def word(self, i: int) -> Word:
        return self.words[i]

    def __contains__(self, word) -> bool:
        return tuple(word) in self._lookup

    def __len__(self) -> int:
        return len(self.words)


def word_label(word: Word) -> str:
    return "".join(f"x{i}" for i in word) if word else "1"


def free_algebra_dim(num_vars: int, degree: int) -> int:
    return sum(num_vars**k for k in range(degree + 1))


def truncated_free_algebra(
    num_vars: int, degree: int, max_dim: int = DEFAULT_MAX_DIM
) -> tuple[StructureAlgebra, MonomialIndex]:
    """Noncommutative polynomials in ``num_vars`` letters modulo words longer than ``degree``.

    Words are listed by length, then lexicographically; letters run from 1.
    """
    if num_vars < 1 or degree < 0:
        raise AlgebraError("need num_vars >= 1 and degree >= 0")
    dim = free_algebra_dim(num_vars, degree)
    if dim > max_dim:
        raise DimensionError(f"truncated free algebra would have dim {dim} > cap {max_dim}")
    words = tuple(
        w for k in range(degree + 1) for w in itertools.product(range(1, num_vars + 1), repeat=k)
    )
    index = MonomialIndex(num_vars, degree, words)
    c = np.zeros((dim, dim, dim), dtype=np.complex128)
    for i, u in enumerate(words):
        for j, v in enumerate(words):
            if len(u) + len(v) <= degree:
                c[i, j, index.index(u + v)] = 1.0
    unit = np.zeros(dim, dtype=np.complex128)
    unit[0] = 1.0
    return StructureAlgebra(dim, c, unit, tuple(word_label(w) for w in words)), index


# ---------------------------------------------------------------------------
# algebra zoo


def entrywise(n: int) -> StructureAlgebra:
    """``C^n`` with the coordinatewise product."""
    c = np.zeros((n, n, n), dtype=np.complex128)
    c[np.arange(n), np.arange(n), np.arange(n)] = 1.0
    return StructureAlgebra(n, c, np.ones(n), tuple(f"e{i}" for i in range(n)))


def matrix_algebra(k: int) -> StructureAlgebra:
    """Full ``k x k`` matrix algebra on matrix units, ``E_ab E_cd = [b == c] E_ad``."""
    n = k * k
    c = np.zeros((n, n, n), dtype=np.complex128)
    for a, b, d in itertools.product(range(k), repeat=3):
        c[a * k + b, b * k + d, a * k + d] = 1.0
    unit = np.eye(k).reshape(-1)
    labels = tuple(f"E{a}{b}" for a in range(k) for b in range(k))
    return StructureAlgebra(n, c, unit, labels)


def cyclic_group_algebra(k: int) -> StructureAlgebra:
    """Group algebra of ``Z/kZ``: circulant convolution ``g_i g_j = g_{(i+j) mod k}``."""
    c = np.zeros((k, k, k), dtype=np.complex128)
    for i, j in itertools.product(range(k), repeat=2):
        c[i, j, (i + j) % k] = 1.0
    unit = np.zeros(k, dtype=np.complex128)
    unit[0] = 1.0
    return StructureAlgebra(k, c, unit, tuple(f"g{i}" for i in range(k)))


def change_basis(alg: StructureAlgebra, P) -> StructureAlgebra:
    """Same algebra in the basis given by the columns of ``P`` (old coordinates = P @ new)."""
    P = np.asarray(P, dtype=np.complex128)
    Pinv = np.linalg.inv(P)
    c = np.einsum("ai,bj,abc,kc->ijk", P, P, alg.structure, Pinv, optimize=True)
    return StructureAlgebra(alg.dim, c, Pinv @ alg.unit)
