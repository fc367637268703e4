"""Generalized Schur products on ``n x m`` complex matrices.

A product is fixed by a row algebra ``A`` (dim ``n``), a column algebra ``B``
(dim ``m``) and invertible matrices ``VA``, ``VB`` sending algebra coordinates
into ``C^n`` and ``C^m``.  It is the bilinear product determined by

    (VA a)(VB b)^*  *  (VA c)(VB d)^*  =  (VA (ac)) (VB (bd))^*.

Writing ``X = VA @ T @ VB^H`` identifies ``X`` with the coefficient matrix ``T``,
i.e. with ``sum T[i, k] e_i ⊗ conj(e_k)`` in ``tensor_conj(A, B)``; the tensor
coordinate of ``T[i, k]`` is ``i * m + k``.  The conjugation on the ``B`` factor is
plain complex conjugation of ``B``-coordinates, which is what makes that map
multiplicative for every choice of ``VB``.

Matrices are vectorised column-major (``vec(X)[i + n * k] = X[i, k]``) wherever a
flat index over matrix entries is needed, e.g. in :meth:`materialize`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from . import kernels
from .algebra import (
    DEFAULT_TOL,
    AlgebraError,
    StructureAlgebra,
    check_algebra,
    direct_sum,
    entrywise,
    tensor_conj,
)

DEFAULT_COND_LIMIT = 1e12


class ProductError(ValueError):
    pass


class SingularBijectionError(ProductError):
    pass


class ShapeError(ProductError):
    pass


@dataclass(frozen=True)
class Corner:
    """One diagonal block of the left-regular representation of a summed product."""

    rows: slice
    cols: slice
    product: "GeneralizedSchurProduct"


class GeneralizedSchurProduct:
    """Immutable generalized Schur product.  Build it with :func:`make_product`."""

    def __init__(self, alg_a: StructureAlgebra, alg_b: StructureAlgebra, va, vb,
                 corners: Optional[tuple[Corner, ...]] = None):
        self.alg_a = alg_a
        self.alg_b = alg_b
        self.va = np.array(va, dtype=np.complex128)
        self.vb = np.array(vb, dtype=np.complex128)
        self.n = alg_a.dim
        self.m = alg_b.dim
        self.va_inv = np.linalg.inv(self.va)
        self.vb_inv_h = np.linalg.inv(self.vb).conj().T
        self.vb_h = self.vb.conj().T
        self._b_conj_values = np.ascontiguousarray(alg_b.coo_values.conj())
        self.corners = corners
        for arr in (self.va, self.vb, self.va_inv, self.vb_inv_h, self.vb_h):
            arr.setflags(write=False)
        self.identity = np.outer(self.va @ alg_a.unit, (self.vb @ alg_b.unit).conj())
        self.identity.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.m)

    @property
    def is_saropp(self) -> bool:
        """True when the product was built as ``A = B``, ``VA = VB``."""
        return self.alg_a == self.alg_b and np.array_equal(self.va, self.vb)

    def __repr__(self):
        return f"GeneralizedSchurProduct(n={self.n}, m={self.m})"

    def check_shape(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.complex128)
        if X.shape != self.shape:
            raise ShapeError(f"matrix has shape {X.shape}, product acts on {self.shape}")
        return X

    # -- coordinates ------------------------------------------------------

    def coefficients(self, X) -> np.ndarray:
        """Coefficient matrix ``T`` with ``X = VA @ T @ VB^H``."""
        return self.va_inv @ self.check_shape(X) @ self.vb_inv_h

    def from_coefficients(self, T) -> np.ndarray:
        return self.va @ T @ self.vb_h

    def to_tensor_coords(self, X) -> np.ndarray:
        return self.coefficients(X).reshape(-1)

    def from_tensor_coords(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.complex128)
        if t.shape != (self.n * self.m,):
            raise ShapeError(f"tensor coordinates must have length {self.n * self.m}")
        return self.from_coefficients(t.reshape(self.n, self.m))

    @cached_property
    def tensor_algebra(self) -> StructureAlgebra:
        return tensor_conj(self.alg_a, self.alg_b)

    # -- arithmetic in coefficient space -----------------------------------

    def multiply_coefficients(self, T, S) -> np.ndarray:
        return kernels.tensor_multiply(
            self.alg_a.coo_index, self.alg_a.coo_values,
            self.alg_b.coo_index, self._b_conj_values,
            np.ascontiguousarray(T, dtype=np.complex128),
            np.ascontiguousarray(S, dtype=np.complex128),
        )

    def left_regular_of_coefficients(self, T) -> np.ndarray:
        """Left-regular matrix of ``T`` on ``tensor_conj(A, B)`` (row-major coordinates)."""
        return kernels.tensor_left_regular(
            self.alg_a.coo_index, self.alg_a.coo_values,
            self.alg_b.coo_index, self._b_conj_values,
            np.ascontiguousarray(T, dtype=np.complex128),
        )

    def holder_bound_of_coefficients(self, T, scratch=None, mark=None) -> float:
        """``sqrt(||L||_1 ||L||_inf)`` for the left-regular matrix of ``T``; bounds ``||L||_2``."""
        N = self.n * self.m
        if scratch is None:
            scratch = np.zeros((N, N), dtype=np.complex128)
            mark = np.zeros((N, N), dtype=np.bool_)
        return kernels.tensor_holder_bound(
            self.alg_a.coo_index, self.alg_a.coo_values,
            self.alg_b.coo_index, self._b_conj_values,
            np.ascontiguousarray(T, dtype=np.complex128), scratch, mark,
        )

    @cached_property
    def unit_coefficients(self) -> np.ndarray:
        return np.outer(self.alg_a.unit, self.alg_b.unit.conj())

    # -- matrix-level API ---------------------------------------------------

    def multiply(self, X, Y) -> np.ndarray:
        T = self.coefficients(X)
        S = self.coefficients(Y)
        return self.from_coefficients(self.multiply_coefficients(T, S))

    def star_power(self, X, k: int) -> np.ndarray:
        if k < 0:
            raise ValueError("power must be nonnegative")
        T = self.coefficients(X)
        R = self.unit_coefficients
        for _ in range(k):
            R = self.multiply_coefficients(T, R)
        return self.from_coefficients(R)

    def left_regular(self, X) -> np.ndarray:
        return self.left_regular_of_coefficients(self.coefficients(X))

    def materialize(self):
        """Dense tensor ``P[o, l, r] = vec(E_l * E_r)[o]`` in column-major vec order."""
        from .ropp import BilinearProductTensor

        n, m = self.shape
        N = n * m
        C = self.tensor_algebra.structure
        # K maps column-major vec(X) to row-major tensor coordinates: t = kron(VA^-1, conj(VB^-1)) vec_r(X)
        K_row = np.kron(self.va_inv, self.vb_inv_h.T)
        perm = np.arange(N).reshape(n, m).T.reshape(-1)  # row-major position of column-major index
        K = K_row[:, perm]
        M = np.kron(self.va, self.vb_h.T)[perm, :]
        P = np.einsum("oc,abc,al,br->olr", M, C, K, K, optimize=True)
        return BilinearProductTensor(n, m, P)


def _check_bijection(V: np.ndarray, dim: int, name: str, cond_limit: float) -> None:
    if V.shape != (dim, dim):
        raise ShapeError(f"{name} has shape {V.shape}, expected {(dim, dim)}")
    cond = np.linalg.cond(V)
    if not np.isfinite(cond) or cond > cond_limit:
        raise SingularBijectionError(f"{name} is singular or ill-conditioned (cond {cond:.3e})")


def make_product(alg_a: StructureAlgebra, alg_b: StructureAlgebra, va=None, vb=None,
                 tol: float = DEFAULT_TOL, cond_limit: float = DEFAULT_COND_LIMIT,
                 validate: bool = True) -> GeneralizedSchurProduct:
    va = np.eye(alg_a.dim) if va is None else np.asarray(va, dtype=np.complex128)
    vb = np.eye(alg_b.dim) if vb is None else np.asarray(vb, dtype=np.complex128)
    _check_bijection(va, alg_a.dim, "VA", cond_limit)
    _check_bijection(vb, alg_b.dim, "VB", cond_limit)
    if validate:
        for name, alg in (("A", alg_a), ("B", alg_b)):
            report = check_algebra(alg, tol)
            if not report.passed:
                raise AlgebraError(
                    f"algebra {name} fails validation: associativity residual "
                    f"{report.associativity_residual:.3e}, unit residual {report.unit_residual:.3e}"
                )
    return GeneralizedSchurProduct(alg_a, alg_b, va, vb)


def hadamard(n: int, m: int) -> GeneralizedSchurProduct:
    return make_product(entrywise(n), entrywise(m))


def saropp_from(alg: StructureAlgebra, va=None, **kwargs) -> GeneralizedSchurProduct:
    """Product with ``B = A`` and ``VB = VA``; it maps PSD pairs to PSD matrices."""
    return make_product(alg, alg, va, va, **kwargs)


def sum_product(rows: Sequence[tuple[StructureAlgebra, np.ndarray]],
                cols: Sequence[tuple[StructureAlgebra, np.ndarray]],
                tol: float = DEFAULT_TOL, validate: bool = True) -> GeneralizedSchurProduct:
    """Product whose row and column algebras are direct sums with block-diagonal bijections.

    The result remembers its corners: block ``(r, c)`` of a matrix multiplies inside
    ``make_product(rows[r], cols[c])`` independently of every other block.
    """
    def combine(parts):
        alg, V = parts[0][0], np.asarray(parts[0][1], dtype=np.complex128)
        offsets = [0, alg.dim]
        for a, W in parts[1:]:
            alg = direct_sum(alg, a)
            V = scipy.linalg.block_diag(V, np.asarray(W, dtype=np.complex128))
            offsets.append(offsets[-1] + a.dim)
        return alg, V, offsets

    if validate:
        for alg, _ in list(rows) + list(cols):
            report = check_algebra(alg, tol)
            if not report.passed:
                raise AlgebraError(f"summand fails validation: {report.to_dict()}")
    alg_a, va, row_off = combine(rows)
    alg_b, vb, col_off = combine(cols)
    corners = []
    for r, (ar, vr) in enumerate(rows):
        for c, (ac, vc) in enumerate(cols):
            corners.append(Corner(
                slice(row_off[r], row_off[r + 1]),
                slice(col_off[c], col_off[c + 1]),
                make_product(ar, ac, vr, vc, validate=False),
            ))
    # direct sums of valid algebras are valid; skip the quintic check on the big algebra
    base = make_product(alg_a, alg_b, va, vb, validate=False)
    return GeneralizedSchurProduct(base.alg_a, base.alg_b, base.va, base.vb, corners=tuple(corners))


def direct_sum_product(g1: GeneralizedSchurProduct, g2: GeneralizedSchurProduct) -> GeneralizedSchurProduct:
    """Product on ``(n1+n2) x (m1+m2)`` matrices; block-diagonal matrices multiply blockwise."""
    return sum_product([(g1.alg_a, g1.va), (g2.alg_a, g2.va)], [(g1.alg_b, g1.vb), (g2.alg_b, g2.vb)])


def as_tuple(gsp: GeneralizedSchurProduct, Xs) -> tuple[np.ndarray, ...]:
    """Validate a matrix tuple (a single matrix counts as a 1-tuple)."""
    if isinstance(Xs, np.ndarray) and Xs.ndim == 2:
        Xs = [Xs]
    Xs = tuple(gsp.check_shape(X) for X in Xs)
    if not Xs:
        raise ShapeError("a matrix tuple needs at least one matrix")
    return Xs
