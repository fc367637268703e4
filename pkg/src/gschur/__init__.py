"""Generalized Schur products, rank-one preserving products and noncommutative positivity."""
from .algebra import (
    AlgebraReport,
    StructureAlgebra,
    check_algebra,
    cyclic_group_algebra,
    direct_sum,
    entrywise,
    find_unit,
    left_regular_representation,
    make_algebra,
    matrix_algebra,
    multiply_elements,
    tensor_conj,
    truncated_free_algebra,
)
from .kernels import BACKEND
from .product import GeneralizedSchurProduct, hadamard, make_product, saropp_from, sum_product
from .ropp import BilinearProductTensor, check_ropp, find_identity, reconstruct, verify_mixed_law
from .schoenberg import build_witness, test_positivity_preserving, verify_witness
from .series import NcPowerSeries, eval_series
from .spectral import Verdict, block_embed, certify_contraction, jsr_bounds, search_contraction_witness

__version__ = "0.1.0"

__all__ = [
    "AlgebraReport", "StructureAlgebra", "check_algebra", "cyclic_group_algebra", "direct_sum",
    "entrywise", "find_unit", "left_regular_representation", "make_algebra", "matrix_algebra",
    "multiply_elements", "tensor_conj", "truncated_free_algebra", "BACKEND",
    "GeneralizedSchurProduct", "hadamard", "make_product", "saropp_from", "sum_product",
    "BilinearProductTensor", "check_ropp", "find_identity", "reconstruct", "verify_mixed_law",
    "build_witness", "test_positivity_preserving", "verify_witness", "NcPowerSeries", "eval_series",
    "Verdict", "block_embed", "certify_contraction", "jsr_bounds", "search_contraction_witness",
]
