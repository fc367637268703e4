import numpy as np
import pytest

from gschur import kernels
from gschur._jit import HAS_NUMBA
from gschur.algebra import cyclic_group_algebra, matrix_algebra, truncated_free_algebra

from conftest import crandn

BACKENDS = ["numpy"] + (["numba"] if HAS_NUMBA else [])
ALGEBRAS = [cyclic_group_algebra(3), matrix_algebra(2), truncated_free_algebra(2, 2)[0]]


def dense_multiply(c, a, b):
    return np.einsum("ijk,i,j->k", c, a, b)


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("alg", ALGEBRAS, ids=["z3", "m2", "free22"])
def test_algebra_kernels_match_dense(backend, alg, rng):
    impl = kernels.IMPLEMENTATIONS[backend]
    a, b = crandn(rng, alg.dim), crandn(rng, alg.dim)
    got = impl["algebra_multiply"](alg.coo_index, alg.coo_values, a, b, alg.dim)
    np.testing.assert_allclose(got, dense_multiply(alg.structure, a, b), atol=1e-12)
    L = impl["algebra_left_regular"](alg.coo_index, alg.coo_values, a, alg.dim)
    np.testing.assert_allclose(L, np.einsum("i,ijk->kj", a, alg.structure), atol=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
def test_tensor_kernels_match_dense(backend, rng):
    A, B = cyclic_group_algebra(3), matrix_algebra(2)
    impl = kernels.IMPLEMENTATIONS[backend]
    n, m = A.dim, B.dim
    T, S = crandn(rng, n, m), crandn(rng, n, m)
    args = (A.coo_index, A.coo_values, B.coo_index, B.coo_values)
    ref = np.einsum("ijp,klq,ik,jl->pq", A.structure, B.structure.conj(), T, S)
    got = impl["tensor_multiply"](A.coo_index, A.coo_values, B.coo_index, B.coo_values.conj(), T, S)
    np.testing.assert_allclose(got, ref, atol=1e-12)
    L = impl["tensor_left_regular"](*args, T)
    # L acts on row-major coefficient vectors of the right factor
    direct = np.einsum("ijp,klq,ik->pqjl", A.structure, B.structure, T).reshape(n * m, n * m)
    np.testing.assert_allclose(L, direct, atol=1e-12)
    scratch = np.zeros((n * m, n * m), dtype=np.complex128)
    mark = np.zeros((n * m, n * m), dtype=np.bool_)
    h = impl["tensor_holder_bound"](*args, T, scratch, mark)
    a = np.abs(direct)
    assert h == pytest.approx(np.sqrt(a.sum(0).max() * a.sum(1).max()), rel=1e-12)
    assert not scratch.any() and not mark.any()
    assert h >= np.linalg.norm(direct, 2) * (1 - 1e-12)


def test_backends_agree_exactly_on_zero_pattern(rng):
    if not HAS_NUMBA:
        pytest.skip("numba not installed")
    alg = truncated_free_algebra(1, 3)[0]
    x = np.zeros(alg.dim, dtype=np.complex128)
    x[1] = 1.0
    for name in ("numpy", "numba"):
        f = kernels.IMPLEMENTATIONS[name]["algebra_left_regular"]
        L = f(alg.coo_index, alg.coo_values, x, alg.dim)
        assert np.all(np.linalg.matrix_power(L, 4) == 0)


def test_backend_flag_is_reported():
    assert kernels.BACKEND in kernels.IMPLEMENTATIONS


@pytest.mark.parametrize("flag,expected", [("1", "numpy"), ("0", "numba" if HAS_NUMBA else "numpy")])
def test_env_flag_selects_backend(flag, expected):
    import os
    import subprocess
    import sys

    env = {**os.environ, "GSCHUR_DISABLE_JIT": flag}
    out = subprocess.run([sys.executable, "-c", "from gschur import kernels; print(kernels.BACKEND)"],
                         capture_output=True, text=True, env=env)
    assert out.stdout.strip() == expected


def test_numpy_backend_end_to_end():
    import os
    import subprocess
    import sys

    code = ("from gschur.zoo import zoo_products; from gschur.ropp import reconstruct; "
            "import numpy as np; g = zoo_products()['cyclic3_free_random']; r = reconstruct(g.materialize()); "
            "X = np.arange(9.0).reshape(3, 3); print(np.abs(r.multiply(X, X) - g.multiply(X, X)).max())")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env={**os.environ, "GSCHUR_DISABLE_JIT": "1"})
    assert float(out.stdout) <= 1e-8
