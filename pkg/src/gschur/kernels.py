"""Structure-constant contraction kernels.

Every algebra in the package stores its structure tensor ``c[i, j, k]`` also in
coordinate (COO) form: an ``(nnz, 3)`` integer array of ``(i, j, k)`` triples and
the matching complex values.  The kernels below contract those lists against
coordinate vectors or coefficient matrices.  Each kernel exists twice, as a
numba ``@njit`` loop and as a vectorised numpy path; the dispatching names at
the bottom of the module pick one according to :data:`gschur._jit.JIT_ENABLED`.

Both paths only ever touch stored nonzeros, so products that the structure
constants send to zero come out as exact zeros on either path.
"""
import numpy as np

from ._jit import JIT_ENABLED, njit

__all__ = [
    "algebra_multiply",
    "algebra_left_regular",
    "tensor_multiply",
    "tensor_left_regular",
    "tensor_holder_bound",
    "IMPLEMENTATIONS",
    "BACKEND",
]


# ---------------------------------------------------------------------------
# numpy path


def algebra_multiply_numpy(idx, vals, a, b, dim):
    out = np.zeros(dim, dtype=np.complex128)
    np.add.at(out, idx[:, 2], vals * a[idx[:, 0]] * b[idx[:, 1]])
    return out


def algebra_left_regular_numpy(idx, vals, a, dim):
    out = np.zeros((dim, dim), dtype=np.complex128)
    np.add.at(out, (idx[:, 2], idx[:, 1]), vals * a[idx[:, 0]])
    return out


def tensor_multiply_numpy(idx_a, vals_a, idx_b, vals_b, T, S):
    n, m = T.shape
    ai, aj, ap = idx_a[:, 0], idx_a[:, 1], idx_a[:, 2]
    bk, bl, bq = idx_b[:, 0], idx_b[:, 1], idx_b[:, 2]
    # W[p, k, l] = sum_{(i,j,p)} cA * T[i, k] * S[j, l]
    W = np.zeros((n, m, m), dtype=np.complex128)
    np.add.at(W, ap, vals_a[:, None, None] * T[ai][:, :, None] * S[aj][:, None, :])
    R = np.zeros((n, m), dtype=np.complex128)
    np.add.at(R, (slice(None), bq), vals_b[None, :] * W[:, bk, bl])
    return R


def tensor_left_regular_numpy(idx_a, vals_a, idx_b, vals_b, T):
    n, m = T.shape
    ai, aj, ap = (idx_a[:, c][:, None] for c in range(3))
    bk, bl, bq = (idx_b[:, c][None, :] for c in range(3))
    L = np.zeros((n, m, n, m), dtype=np.complex128)
    np.add.at(L, (ap, bq, aj, bl), vals_a[:, None] * vals_b[None, :] * T[ai, bk])
    return L.reshape(n * m, n * m)


def tensor_holder_bound_numpy(idx_a, vals_a, idx_b, vals_b, T, scratch, mark):
    a = np.abs(tensor_left_regular_numpy(idx_a, vals_a, idx_b, vals_b, T))
    return float(np.sqrt(a.sum(axis=0).max(initial=0.0) * a.sum(axis=1).max(initial=0.0)))


# ---------------------------------------------------------------------------
# numba path


@njit(cache=True)
def algebra_multiply_jit(idx, vals, a, b, dim):
    out = np.zeros(dim, dtype=np.complex128)
    for s in range(vals.shape[0]):
        out[idx[s, 2]] += vals[s] * a[idx[s, 0]] * b[idx[s, 1]]
    return out


@njit(cache=True)
def algebra_left_regular_jit(idx, vals, a, dim):
    out = np.zeros((dim, dim), dtype=np.complex128)
    for s in range(vals.shape[0]):
        out[idx[s, 2], idx[s, 1]] += vals[s] * a[idx[s, 0]]
    return out


@njit(cache=True)
def tensor_multiply_jit(idx_a, vals_a, idx_b, vals_b, T, S):
    n, m = T.shape
    W = np.zeros((n, m, m), dtype=np.complex128)
    for s in range(vals_a.shape[0]):
        i = idx_a[s, 0]
        j = idx_a[s, 1]
        p = idx_a[s, 2]
        v = vals_a[s]
        for k in range(m):
            t = v * T[i, k]
            if t == 0:
                continue
            for l in range(m):
                W[p, k, l] += t * S[j, l]
    R = np.zeros((n, m), dtype=np.complex128)
    for s in range(vals_b.shape[0]):
        k = idx_b[s, 0]
        l = idx_b[s, 1]
        q = idx_b[s, 2]
        v = vals_b[s]
        for p in range(n):
            R[p, q] += v * W[p, k, l]
    return R


@njit(cache=True)
def tensor_left_regular_jit(idx_a, vals_a, idx_b, vals_b, T):
    n, m = T.shape
    L = np.zeros((n * m, n * m), dtype=np.complex128)
    for s in range(vals_a.shape[0]):
        i = idx_a[s, 0]
        j = idx_a[s, 1]
        p = idx_a[s, 2]
        va = vals_a[s]
        for t in range(vals_b.shape[0]):
            k = idx_b[t, 0]
            x = T[i, k]
            if x == 0:
                continue
            L[p * m + idx_b[t, 2], j * m + idx_b[t, 1]] += va * vals_b[t] * x
    return L


@njit(cache=True)
def tensor_holder_bound_jit(idx_a, vals_a, idx_b, vals_b, T, scratch, mark):
    """sqrt(||L||_1 ||L||_inf) of the left-regular matrix of T without a dense pass.

    ``scratch`` (complex) and ``mark`` (bool) are caller-owned ``(nm, nm)`` buffers,
    all zero / False on entry and restored to that state on exit.
    """
    n, m = T.shape
    na = vals_a.shape[0]
    nb = vals_b.shape[0]
    rows = np.empty(na * nb, dtype=np.int64)
    cols = np.empty(na * nb, dtype=np.int64)
    cnt = 0
    for s in range(na):
        i = idx_a[s, 0]
        j = idx_a[s, 1]
        p = idx_a[s, 2]
        va = vals_a[s]
        for t in range(nb):
            x = T[i, idx_b[t, 0]]
            if x == 0:
                continue
            r = p * m + idx_b[t, 2]
            c = j * m + idx_b[t, 1]
            if not mark[r, c]:
                mark[r, c] = True
                rows[cnt] = r
                cols[cnt] = c
                cnt += 1
            scratch[r, c] += va * vals_b[t] * x
    rowsum = np.zeros(n * m)
    colsum = np.zeros(n * m)
    for t in range(cnt):
        r = rows[t]
        c = cols[t]
        v = abs(scratch[r, c])
        rowsum[r] += v
        colsum[c] += v
        scratch[r, c] = 0
        mark[r, c] = False
    if cnt == 0:
        return 0.0
    return np.sqrt(colsum.max() * rowsum.max())


IMPLEMENTATIONS = {
    "numpy": {
        "algebra_multiply": algebra_multiply_numpy,
        "algebra_left_regular": algebra_left_regular_numpy,
        "tensor_multiply": tensor_multiply_numpy,
        "tensor_left_regular": tensor_left_regular_numpy,
        "tensor_holder_bound": tensor_holder_bound_numpy,
    },
    "numba": {
        "algebra_multiply": algebra_multiply_jit,
        "algebra_left_regular": algebra_left_regular_jit,
        "tensor_multiply": tensor_multiply_jit,
        "tensor_left_regular": tensor_left_regular_jit,
        "tensor_holder_bound": tensor_holder_bound_jit,
    },
}

BACKEND = "numba" if JIT_ENABLED else "numpy"

algebra_multiply = IMPLEMENTATIONS[BACKEND]["algebra_multiply"]
algebra_left_regular = IMPLEMENTATIONS[BACKEND]["algebra_left_regular"]
tensor_multiply = IMPLEMENTATIONS[BACKEND]["tensor_multiply"]
tensor_left_regular = IMPLEMENTATIONS[BACKEND]["tensor_left_regular"]
tensor_holder_bound = IMPLEMENTATIONS[BACKEND]["tensor_holder_bound"]
