"""Named example products used by the tests, the acceptance suite and ``gschur algebra zoo``.

Random structure tensors are almost never associative, so "random" products are
drawn from these algebras with random well-conditioned bijections.
"""
from __future__ import annotations

import numpy as np

from .algebra import (
    StructureAlgebra,
    cyclic_group_algebra,
    entrywise,
    matrix_algebra,
    truncated_free_algebra,
)
from .product import GeneralizedSchurProduct, hadamard, make_product, saropp_from


def random_bijection(dim: int, rng: np.random.Generator, spread: float = 0.4) -> np.ndarray:
    """``I + spread * G / ||G||``: condition number at most ``(1 + spread) / (1 - spread)``."""
    G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return np.eye(dim) + spread * G / np.linalg.norm(G, 2)


def algebra(kind: str, size: int = 2, num_vars: int = 1, degree: int = 2) -> StructureAlgebra:
    if kind == "entrywise":
        return entrywise(size)
    if kind == "matrix":
        return matrix_algebra(size)
    if kind == "cyclic":
        return cyclic_group_algebra(size)
    if kind == "free":
        return truncated_free_algebra(num_vars, degree)[0]
    raise ValueError(f"unknown algebra kind {kind!r}")


def zoo_products(seed: int = 0) -> dict[str, GeneralizedSchurProduct]:
    rng = np.random.default_rng(seed)
    free12 = truncated_free_algebra(1, 2)[0]
    z3, z4 = cyclic_group_algebra(3), cyclic_group_algebra(4)
    m2 = matrix_algebra(2)
    return {
        "hadamard_3x4": hadamard(3, 4),
        "hadamard_4x4": hadamard(4, 4),
        "cyclic4_saropp": saropp_from(z4),
        "cyclic4_random": make_product(z4, z4, random_bijection(4, rng), random_bijection(4, rng)),
        "cyclic3_free_random": make_product(z3, free12, random_bijection(3, rng), random_bijection(3, rng)),
        "matrix2_saropp": saropp_from(m2),
        "matrix2_entrywise_random": make_product(m2, entrywise(2), random_bijection(4, rng),
                                                 random_bijection(2, rng)),
        # ordinary 3x3 matrix multiplication acting on vec(X), a 9 x 1 matrix
        "matmul3": make_product(matrix_algebra(3), entrywise(1)),
        "free22_saropp": saropp_from(truncated_free_algebra(2, 2)[0]),
        "entrywise_random": make_product(entrywise(3), entrywise(2), random_bijection(3, rng),
                                         random_bijection(2, rng)),
    }


def zoo_saropps(seed: int = 0) -> dict[str, GeneralizedSchurProduct]:
    rng = np.random.default_rng(seed + 1)
    return {
        "hadamard_4x4": hadamard(4, 4),
        "cyclic4": saropp_from(cyclic_group_algebra(4)),
        "cyclic4_random": saropp_from(cyclic_group_algebra(4), random_bijection(4, rng)),
        "cyclic3_random": saropp_from(cyclic_group_algebra(3), random_bijection(3, rng)),
        "matrix2": saropp_from(matrix_algebra(2)),
        "matrix2_random": saropp_from(matrix_algebra(2), random_bijection(4, rng)),
        "free12": saropp_from(truncated_free_algebra(1, 2)[0]),
        "free22": saropp_from(truncated_free_algebra(2, 2)[0]),
    }
