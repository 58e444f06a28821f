"""Seeded random states, unitaries and observables.

All draws come from ``numpy.random.Generator`` over the PCG64 bit generator
seeded with a single unsigned integer, so streams are reproducible anywhere
the same algorithm is available.
"""

from __future__ import annotations

import numpy as np

PRNG_NAME = "numpy.random.Generator(PCG64)"


def make_rng(seed: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_ket(rng: np.random.Generator, d: int) -> np.ndarray:
    k = _ginibre(rng, d, 1)[:, 0]
    return k / np.linalg.norm(k)


def random_density(rng: np.random.Generator, d: int, rank: int | None = None) -> np.ndarray:
    """Random density matrix ``G G^† / tr``; ``rank`` defaults to full rank."""
    g = _ginibre(rng, d, d if rank is None else rank)
    w = g @ g.conj().T
    w = 0.5 * (w + w.conj().T)
    return w / np.trace(w).real


def random_pure_density(rng: np.random.Generator, d: int) -> np.ndarray:
    k = random_ket(rng, d)
    return np.outer(k, k.conj())


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    q, r = np.linalg.qr(_ginibre(rng, d, d))
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_hermitian(rng: np.random.Generator, d: int) -> np.ndarray:
    g = _ginibre(rng, d, d)
    return 0.5 * (g + g.conj().T)
