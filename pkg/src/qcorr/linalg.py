"""
Dense complex matrix kernel.

Matrices and kets are plain numpy arrays (complex128). A partition is an
ordered sequence of subsystem dimensions; composite indices follow the
Kronecker convention, so the leftmost subsystem varies slowest:
``index = ((i1 * d2 + i2) * d3 + i3) ...``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import DimensionError, NotHermitianError, NotUnitaryError

DEFAULT_TOL = 1e-10


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-d complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty 2-d array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def as_square(m, name: str = "matrix") -> np.ndarray:
    a = as_matrix(m, name)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    return a


def as_ket(k, name: str = "ket") -> np.ndarray:
    a = np.asarray(k, dtype=complex)
    if a.ndim == 2 and 1 in a.shape:
        a = a.reshape(-1)
    if a.ndim != 1 or a.size < 1:
        raise DimensionError(f"{name} must be a 1-d vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def check_partition(dims: Iterable[int], total: int | None = None) -> tuple[int, ...]:
    """Validate a partition and return it as a tuple.

    Every factor must have dimension >= 2, and when ``total`` is given the
    product of the factors must equal it.
    """
    out = tuple(int(d) for d in dims)
    if not out:
        raise DimensionError("partition must have at least one factor")
    if any(d < 2 for d in out):
        raise DimensionError(f"every subsystem dimension must be >= 2, got {list(out)}")
    if total is not None and int(np.prod(out)) != total:
        raise DimensionError(
            f"partition {list(out)} has product {int(np.prod(out))}, expected {total}"
        )
    return out


def basis_ket(d: int, i: int) -> np.ndarray:
    e = np.zeros(d, dtype=complex)
    e[i] = 1.0
    return e


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(m))


def tensor(*mats) -> np.ndarray:
    """Kronecker product of one or more matrices (or kets).

    ``(a ⊗ b)[i*rb + k, j*cb + l] = a[i, j] * b[k, l]``
    """
    if not mats:
        raise ValueError("tensor needs at least one operand")
    arrs = [np.asarray(m, dtype=complex) for m in mats]
    return reduce(np.kron, arrs)


def partial_trace(w, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Reduced matrix of ``w`` on the factors listed in ``keep``.

    Kept factors appear in ascending order regardless of how ``keep`` is
    ordered.
    """
    w = as_square(w, "w")
    dims = check_partition(dims, w.shape[0])
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise DimensionError("keep must name at least one subsystem")
    n = len(dims)
    if keep[0] < 0 or keep[-1] >= n:
        raise DimensionError(f"keep indices {keep} out of range for {n} subsystems")

    t = w.reshape(dims + dims)
    row = list(range(n))
    col = [n + i for i in range(n)]
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = [row[i] for i in keep] + [col[i] for i in keep]
    reduced = np.einsum(t, row + col, out)
    d_keep = int(np.prod([dims[i] for i in keep]))
    return reduced.reshape(d_keep, d_keep)


def hermiticity_deviation(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - dagger(m)))) if m.size else 0.0


def is_hermitian(m, tol: float = DEFAULT_TOL) -> bool:
    m = as_square(m)
    return hermiticity_deviation(m) <= tol * max(1.0, float(np.linalg.norm(m)))


def is_unitary(u, tol: float = DEFAULT_TOL) -> bool:
    u = as_square(u)
    eye = np.eye(u.shape[0])
    return float(np.max(np.abs(dagger(u) @ u - eye))) <= tol


def hermitian_eig(m, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns
    -------
    eigenvalues : ndarray
        Real, in descending order.
    eigenvectors : ndarray
        Orthonormal eigenvectors as columns, matching ``eigenvalues``.

    Raises
    ------
    NotHermitianError
        If ``m`` deviates from its adjoint by more than ``tol`` (relative to
        ``max(1, ||m||_F)``).
    """
    m = as_square(m, "m")
    if not is_hermitian(m, tol):
        raise NotHermitianError(
            f"matrix is not Hermitian (deviation {hermiticity_deviation(m):.3e})"
        )
    vals, vecs = np.linalg.eigh(0.5 * (m + dagger(m)))
    return vals[::-1].copy(), vecs[:, ::-1].copy()


def unitary_fractional_power(u, t: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Principal power ``u**t`` of a unitary matrix.

    Eigenphases are taken in (-pi, pi]. A complex Schur form is used so the
    eigenbasis stays orthonormal inside degenerate eigenspaces.
    """
    u = as_square(u, "u")
    if not is_unitary(u, tol):
        raise NotUnitaryError("matrix is not unitary")
    t = float(t)
    if t == 0.0:
        return np.eye(u.shape[0], dtype=complex)
    if t == 1.0:
        return u.copy()
    schur_form, z = scipy.linalg.schur(u, output="complex")
    phases = np.angle(np.diag(schur_form))
    # angle() may land on -pi for an eigenvalue of exactly -1
    phases = np.where(phases <= -np.pi + 1e-12, np.pi, phases)
    return (z * np.exp(1j * t * phases)) @ dagger(z)


@dataclass(frozen=True)
class DensityReport:
    hermiticity: float
    trace_deviation: float
    min_eigenvalue: float
    tol: float

    @property
    def hermitian_ok(self) -> bool:
        return self.hermiticity <= self.tol

    @property
    def trace_ok(self) -> bool:
        return self.trace_deviation <= self.tol

    @property
    def positive_ok(self) -> bool:
        return self.min_eigenvalue >= -self.tol

    @property
    def ok(self) -> bool:
        return self.hermitian_ok and self.trace_ok and self.positive_ok

    def failures(self) -> list[str]:
        out = []
        if not self.hermitian_ok:
            out.append(f"hermiticity deviation {self.hermiticity:.3e}")
        if not self.trace_ok:
            out.append(f"trace deviation {self.trace_deviation:.3e}")
        if not self.positive_ok:
            out.append(f"minimum eigenvalue {self.min_eigenvalue:.3e}")
        return out

    def as_dict(self) -> dict:
        return {
            "hermiticity": self.hermiticity,
            "trace_deviation": self.trace_deviation,
            "min_eigenvalue": self.min_eigenvalue,
            "tol": self.tol,
            "ok": self.ok,
        }


def validate_density(w, tol: float = DEFAULT_TOL) -> DensityReport:
    """Check Hermiticity, unit trace and positivity; failures go in the report."""
    w = as_square(w, "w")
    herm = hermiticity_deviation(w)
    tr_dev = float(abs(np.trace(w) - 1.0))
    min_eig = float(np.linalg.eigvalsh(0.5 * (w + dagger(w)))[0])
    return DensityReport(herm, tr_dev, min_eig, float(tol))
