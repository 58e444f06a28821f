import numpy as np
import pytest

from qcorr.sampling import make_rng


@pytest.fixture
def rng():
    return make_rng(1234)


def brute_partial_trace(w, dims, keep):
    """Explicit index summation, independent of the einsum implementation."""
    n = len(dims)
    keep = sorted(keep)
    kept_dims = [dims[i] for i in keep]
    d_keep = int(np.prod(kept_dims))
    out = np.zeros((d_keep, d_keep), dtype=complex)

    def compose(idx):
        k = 0
        for i, d in zip(idx, dims):
            k = k * d + i
        return k

    def sub(idx):
        k = 0
        for i in keep:
            k = k * dims[i] + idx[i]
        return k

    for row in np.ndindex(*dims):
        for col in np.ndindex(*dims):
            if all(row[i] == col[i] for i in range(n) if i not in keep):
                out[sub(row), sub(col)] += w[compose(row), compose(col)]
    return out


def brute_kron(a, b):
    ra, ca = a.shape
    rb, cb = b.shape
    out = np.zeros((ra * rb, ca * cb), dtype=complex)
    for i in range(ra):
        for j in range(ca):
            for k in range(rb):
                for l in range(cb):
                    out[i * rb + k, j * cb + l] = a[i, j] * b[k, l]
    return out
