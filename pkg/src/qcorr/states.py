"""Density matrices, eigen-mixtures, Schmidt forms and relative states."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, InvalidStateError, UndefinedConditionalError
from .linalg import (
    DEFAULT_TOL,
    as_ket,
    as_square,
    check_partition,
    hermitian_eig,
    validate_density,
)

ZERO_WEIGHT = 1e-12
RELATIVE_STATE_THRESHOLD = 1e-12


def fix_phase(k: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude amplitude is real positive.

    Ties go to the lowest index.
    """
    mags = np.abs(k)
    i = int(np.argmax(mags))
    if mags[i] == 0.0:
        return k
    out = k * (np.conj(k[i]) / mags[i])
    out[i] = mags[i]
    return out


def require_density(w, tol: float = DEFAULT_TOL) -> np.ndarray:
    w = as_square(w, "density")
    report = validate_density(w, tol)
    if not report.ok:
        raise InvalidStateError("invalid density matrix: " + "; ".join(report.failures()))
    return w


def density_from_ket(k) -> np.ndarray:
    """``|k><k| / <k|k>``"""
    k = as_ket(k)
    norm2 = float(np.vdot(k, k).real)
    if norm2 <= 0.0:
        raise InvalidStateError("zero vector has no density matrix")
    return np.outer(k, k.conj()) / norm2


def purity(w) -> float:
    """``tr(w^2)``; equals 1 exactly for one-dimensional projectors."""
    w = as_square(w, "density")
    # tr(w w) = sum_ij w_ij w_ji = sum |w_ij|^2 for Hermitian w
    return float(np.real(np.einsum("ij,ji->", w, w)))


def eigen_mixture(w, tol: float = DEFAULT_TOL) -> list[tuple[float, np.ndarray]]:
    """Decompose ``w`` as a mixture of orthonormal eigenstates.

    Weights are descending and those at or below 1e-12 are dropped. Within a
    degenerate weight the kets are ordered lexicographically (after phase
    fixing) so repeated calls agree.
    """
    w = require_density(w, tol)
    vals, vecs = hermitian_eig(w, tol)
    terms = []
    for k in range(len(vals)):
        if vals[k] > ZERO_WEIGHT:
            terms.append((float(vals[k]), fix_phase(vecs[:, k])))

    def key(term):
        weight, ket = term
        flat = np.column_stack([ket.real, ket.imag]).ravel()
        return (-round(weight / DEFAULT_TOL),) + tuple(-np.round(flat, 9))

    return sorted(terms, key=key)


@dataclass(frozen=True, eq=False)
class SchmidtForm:
    coefficients: np.ndarray
    left: np.ndarray
    right: np.ndarray
    dims: tuple[int, int]

    def __len__(self) -> int:
        return len(self.coefficients)

    def ket(self) -> np.ndarray:
        """Rebuild ``sum_k c_k |l_k> ⊗ |r_k>``."""
        return np.einsum("k,ak,bk->ab", self.coefficients, self.left, self.right).reshape(-1)


def schmidt(psi, dims: Sequence[int], tol: float = DEFAULT_TOL) -> SchmidtForm:
    """Schmidt decomposition of a bipartite pure state.

    Coefficients are descending; coefficients at or below 1e-12 are dropped.
    ``left[:, k]`` and ``right[:, k]`` are the paired basis vectors. The phase
    of each left vector is fixed so its largest amplitude is real positive;
    the right vector carries the compensating phase.
    """
    psi = as_ket(psi, "psi")
    dims = check_partition(dims, psi.size)
    if len(dims) != 2:
        raise DimensionError(f"schmidt needs exactly two factors, got {len(dims)}")
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > tol:
        raise InvalidStateError(f"psi is not normalized (norm {norm:.12g})")
    u, s, vh = np.linalg.svd(psi.reshape(dims), full_matrices=False)
    keep = s > ZERO_WEIGHT
    u, s, vh = u[:, keep], s[keep], vh[keep, :]
    left = np.empty_like(u)
    right = np.empty((dims[1], len(s)), dtype=complex)
    for k in range(len(s)):
        lk = fix_phase(u[:, k])
        # absorb the phase change of the left vector into the right one
        phase = np.vdot(u[:, k], lk)
        left[:, k] = lk
        right[:, k] = vh[k, :] * np.conj(phase)
    return SchmidtForm(s, left, right, (dims[0], dims[1]))


def relative_state(
    psi, chi, dims: Sequence[int], threshold: float = RELATIVE_STATE_THRESHOLD
) -> np.ndarray:
    """State of factor 1 relative to the state ``chi`` of factor 2.

    Proportional to the partial inner product ``<chi|psi>`` over factor 2 and
    normalized. For every factor-1 observable ``A`` it satisfies
    ``<phi|A|phi> = <psi|A⊗P|psi> / <psi|1⊗P|psi>`` with ``P = |chi><chi|``.

    Raises
    ------
    UndefinedConditionalError
        If ``<psi|1⊗P|psi>`` does not exceed ``threshold``.
    """
    psi = as_ket(psi, "psi")
    chi = as_ket(chi, "chi")
    dims = check_partition(dims, psi.size)
    if len(dims) != 2:
        raise DimensionError(f"relative_state needs exactly two factors, got {len(dims)}")
    if chi.size != dims[1]:
        raise DimensionError(f"chi has dimension {chi.size}, factor 2 has {dims[1]}")
    chi = chi / np.linalg.norm(chi)
    phi = psi.reshape(dims) @ chi.conj()
    weight = float(np.vdot(phi, phi).real) / float(np.vdot(psi, psi).real)
    if weight <= threshold:
        raise UndefinedConditionalError(
            f"relative state undefined: branch weight {weight:.3e} <= {threshold:.1e}"
        )
    return fix_phase(phi / np.linalg.norm(phi))
