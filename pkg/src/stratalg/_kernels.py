"""Bulk F_p kernels for the enumeration-heavy paths.

Everything here works on plain int64 numpy arrays with residues in [0, p).
The hot loops have two implementations: a numba-compiled one and a pure
numpy one. Set STRATALG_NO_NUMBA=1 to force the numpy path; callers go
through the dispatching wrappers at the bottom.

Intermediate products stay below 2**63 because enumeration is capped at
p**n <= 2**24 and all operands are reduced mod p between contractions.
"""

import os

import numpy as np

NUMBA_DISABLED = bool(os.environ.get("STRATALG_NO_NUMBA"))

try:
    if NUMBA_DISABLED:
        raise ImportError("numba disabled by STRATALG_NO_NUMBA")
    from numba import njit, prange
    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

    prange = range


def bulk_multiply_numpy(T, La, Lb, A, B, p):
    """Row-paired products: out[m] = A[m] * B[m] under the operation
    (T, La, Lb). Shapes: T (n,n,n) indexed [i,j,k]; La, Lb (n,n) indexed
    [i,k]; A, B (N,n). Returns (N,n) residues."""
    AB = (A[:, :, None] * B[:, None, :]) % p
    out = np.einsum("ijk,nij->nk", T, AB) % p
    if La.any():
        out = (out + A @ La) % p
    if Lb.any():
        out = (out + B @ Lb) % p
    return out % p


@njit(cache=True)
def _bulk_multiply_nb(T, La, Lb, A, B, p):
    N, n = A.shape
    out = np.zeros((N, n), dtype=np.int64)
    for m in range(N):
        for k in range(n):
            acc = 0
            for i in range(n):
                ai = A[m, i]
                if ai == 0:
                    continue
                for j in range(n):
                    t = T[i, j, k]
                    if t != 0:
                        acc += t * ((ai * B[m, j]) % p)
            for i in range(n):
                acc += La[i, k] * A[m, i]
            for j in range(n):
                acc += Lb[j, k] * B[m, j]
            out[m, k] = acc % p
    return out


def commute_rows_numpy(T, La, Lb, V, p, chunk=512):
    """Packed commutation table: bit j of row i is 1 iff V[i] and V[j]
    commute. Returns (N, ceil(N/8)) uint8."""
    N, n = V.shape
    M = np.stack([(T[:, :, k] - T[:, :, k].T) % p for k in range(n)])
    D = (La - Lb) % p
    dv = (V @ D) % p  # (N, n); delta contribution per vector
    packed = np.empty((N, (N + 7) // 8), dtype=np.uint8)
    for start in range(0, N, chunk):
        stop = min(start + chunk, N)
        Vc = V[start:stop]
        ok = np.ones((stop - start, N), dtype=bool)
        for k in range(n):
            G = ((Vc @ M[k]) % p) @ V.T
            G = (G + dv[start:stop, k:k + 1] - dv[None, :, k]) % p
            ok &= G == 0
        packed[start:stop] = np.packbits(ok, axis=1)
    return packed


@njit(parallel=True, cache=True)
def _commute_rows_nb(M, dv, V, p):
    N, n = V.shape
    width = (N + 7) // 8
    packed = np.zeros((N, width), dtype=np.uint8)
    VM = np.zeros((n, N, n), dtype=np.int64)
    for k in range(n):
        for i in range(N):
            for j in range(n):
                acc = 0
                for t in range(n):
                    acc += V[i, t] * M[k, t, j]
                VM[k, i, j] = acc % p
    for i in prange(N):
        row = np.zeros(width, dtype=np.uint8)
        for j in range(N):
            commutes = True
            for k in range(n):
                acc = dv[i, k] - dv[j, k]
                for t in range(n):
                    acc += VM[k, i, t] * V[j, t]
                if acc % p != 0:
                    commutes = False
                    break
            if commutes:
                row[j >> 3] |= np.uint8(128 >> (j & 7))
        packed[i] = row
    return packed


def commute_rows_numba(T, La, Lb, V, p):
    n = V.shape[1]
    M = np.stack([(T[:, :, k] - T[:, :, k].T) % p for k in range(n)])
    dv = (V @ ((La - Lb) % p)) % p
    return _commute_rows_nb(M, dv, V, p)


def bulk_multiply(T, La, Lb, A, B, p):
    if HAS_NUMBA and len(A) > 2048:
        return _bulk_multiply_nb(T, La, Lb, A, B, p)
    return bulk_multiply_numpy(T, La, Lb, A, B, p)


def commute_rows(T, La, Lb, V, p):
    if HAS_NUMBA:
        return commute_rows_numba(T, La, Lb, V, p)
    return commute_rows_numpy(T, La, Lb, V, p)
