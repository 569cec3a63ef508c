"""Bulk kernels: numba and numpy paths must agree exactly."""

import os
import subprocess
import sys

import numpy as np
import pytest

from stratalg import Field, builtin_model, multiply, vector
from stratalg import _kernels
from stratalg.strata import space_matrix, to_dense_arrays


def bulk_reference(model, A, B):
    """Scalar reference for the vectorized kernels."""
    f = model.field
    out = []
    for a, b in zip(A, B):
        prod = multiply(model.operation, vector(f, a), vector(f, b))
        out.append([int(str(x)) for x in prod])
    return np.array(out, dtype=np.int64)


@pytest.mark.parametrize("name,params,p,n", [
    ("parametric3", (2, 3, 5, 1, 4, 6), 7, 3),
    ("nonlinear3", (2, 3, 5, 1, 4, 6), 7, 3),
    ("parametric4", (2, 3, 5, 7, 11, 13), 5, 4),
])
def test_bulk_multiply_matches_scalar_multiply(name, params, p, n):
    model = builtin_model(name, params=params, field=Field(p))
    T, La, Lb = to_dense_arrays(model.operation, p)
    rng = np.random.default_rng(0)
    A = rng.integers(0, p, size=(200, n))
    B = rng.integers(0, p, size=(200, n))
    want = bulk_reference(model, A, B)
    got_np = _kernels.bulk_multiply_numpy(T, La, Lb, A, B, p)
    assert np.array_equal(got_np, want)
    if _kernels.HAS_NUMBA:
        got_nb = _kernels._bulk_multiply_nb(T, La, Lb, A, B, p)
        assert np.array_equal(got_nb, want)


def test_bulk_multiply_dispatch_thresholds(f7):
    model = builtin_model("parametric3", params=(2, 3, 5, 1, 4, 6), field=f7)
    T, La, Lb = to_dense_arrays(model.operation, 7)
    rng = np.random.default_rng(1)
    A = rng.integers(0, 7, size=(3000, 3))
    B = rng.integers(0, 7, size=(3000, 3))
    got = _kernels.bulk_multiply(T, La, Lb, A, B, 7)
    assert np.array_equal(got, _kernels.bulk_multiply_numpy(T, La, Lb, A, B, 7))


def test_commute_rows_paths_agree(f7):
    model = builtin_model("nonlinear3", params=(2, 3, 5, 1, 4, 6), field=f7)
    T, La, Lb = to_dense_arrays(model.operation, 7)
    V = space_matrix(7, 3)
    got_np = _kernels.commute_rows_numpy(T, La, Lb, V, 7)
    # spot-check packed bits against the definition a*b == b*a
    AB = _kernels.bulk_multiply_numpy(T, La, Lb, V[:1].repeat(len(V), 0), V, 7)
    BA = _kernels.bulk_multiply_numpy(T, La, Lb, V, V[:1].repeat(len(V), 0), 7)
    commute0 = (AB == BA).all(axis=1)
    assert np.array_equal(np.unpackbits(got_np[0])[:len(V)].astype(bool),
                          commute0)
    if _kernels.HAS_NUMBA:
        got_nb = _kernels.commute_rows_numba(T, La, Lb, V, 7)
        assert np.array_equal(got_np, got_nb)


def test_numba_flag_forces_the_numpy_path(tmp_path):
    code = (
        "import stratalg._kernels as k\n"
        "from stratalg import Field, builtin_model, discover_strata\n"
        "assert not k.HAS_NUMBA\n"
        "m = builtin_model('nonlinear3', params=(2, 3, 5, 1, 4, 6),"
        " field=Field(7))\n"
        "part = discover_strata(m, 7)\n"
        "print(sorted(part.sizes().values()), len(part.exceptional))\n"
    )
    env = dict(os.environ, STRATALG_NO_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    model = builtin_model("nonlinear3", params=(2, 3, 5, 1, 4, 6),
                          field=Field(7))
    from stratalg import discover_strata
    part = discover_strata(model, 7)
    want = f"{sorted(part.sizes().values())} {len(part.exceptional)}"
    assert out.stdout.strip() == want
