"""Observables and the standard operators built from them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionError, InvalidStateError
from .linalg import (
    DEFAULT_TOL,
    as_ket,
    as_square,
    basis_ket,
    dagger,
    hermitian_eig,
    tensor,
)

SPECTRAL_MERGE_TOL = 1e-8


def _format_value(v: float) -> str:
    return f"{v:.12g}"


@dataclass(frozen=True, eq=False)
class Observable:
    """A Hermitian matrix together with its spectral decomposition.

    ``eigenvalues[k]`` belongs to ``projectors[k]`` and ``outcomes[k]`` is
    the label used for that outcome in joint distributions. Distinct
    eigenvalues are stored once; degenerate eigenspaces share one projector.
    """

    matrix: np.ndarray
    eigenvalues: tuple[float, ...]
    projectors: tuple[np.ndarray, ...]
    label: str = ""
    outcomes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.outcomes:
            object.__setattr__(
                self, "outcomes", tuple(_format_value(v) for v in self.eigenvalues)
            )
        if len(self.outcomes) != len(self.eigenvalues):
            raise ValueError("one outcome label is needed per distinct eigenvalue")
        self.matrix.setflags(write=False)
        for p in self.projectors:
            p.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_matrix(
        cls,
        m,
        label: str = "",
        outcomes: Sequence[str] = (),
        merge_tol: float = SPECTRAL_MERGE_TOL,
    ) -> "Observable":
        """Spectral decomposition of a Hermitian matrix.

        Outcomes are ordered by descending eigenvalue; eigenvalues closer
        than ``merge_tol`` are merged into one outcome.
        """
        m = as_square(m, "observable")
        vals, vecs = hermitian_eig(m)
        groups: list[list[int]] = []
        for k, v in enumerate(vals):
            if groups and abs(vals[groups[-1][0]] - v) <= merge_tol:
                groups[-1].append(k)
            else:
                groups.append([k])
        eigenvalues = tuple(float(np.mean(vals[g])) for g in groups)
        projectors = tuple(vecs[:, g] @ dagger(vecs[:, g]) for g in groups)
        herm = 0.5 * (m + dagger(m))
        return cls(herm, eigenvalues, projectors, label, tuple(outcomes))

    @classmethod
    def from_projectors(
        cls,
        values: Sequence[float],
        projectors: Sequence,
        label: str = "",
        outcomes: Sequence[str] = (),
        tol: float = DEFAULT_TOL,
    ) -> "Observable":
        """Build an observable from an explicit resolution of the identity.

        The given order of outcomes is kept. Raises ``ValueError`` when the
        projectors are not complete, idempotent and mutually orthogonal.
        """
        projs = [as_square(p, "projector").copy() for p in projectors]
        if len(values) != len(projs) or not projs:
            raise ValueError("need one value per projector")
        if len(set(values)) != len(values):
            raise ValueError("eigenvalues must be distinct")
        d = projs[0].shape[0]
        if any(p.shape != (d, d) for p in projs):
            raise DimensionError("projectors must share a dimension")
        if np.max(np.abs(sum(projs) - np.eye(d))) > tol:
            raise ValueError("projectors do not sum to the identity")
        for i, p in enumerate(projs):
            for j, q in enumerate(projs):
                target = p if i == j else 0.0
                if np.max(np.abs(p @ q - target)) > tol:
                    raise ValueError("projectors are not orthogonal and idempotent")
        matrix = sum(float(v) * p for v, p in zip(values, projs))
        return cls(
            matrix,
            tuple(float(v) for v in values),
            tuple(projs),
            label,
            tuple(outcomes),
        )


def identity(d: int, label: str = "1") -> Observable:
    return Observable(np.eye(d, dtype=complex), (1.0,), (np.eye(d, dtype=complex),), label)


@dataclass(frozen=True, order=True)
class BasisIndex:
    """Position of one operator in the canonical Hermitian basis.

    ``part`` is ``"real"`` for the symmetric combination and ``"imag"`` for
    the antisymmetric one, which only exists for ``mu < nu``.
    """

    mu: int
    nu: int
    part: str = "real"

    def __post_init__(self):
        if self.part not in ("real", "imag"):
            raise ValueError(f"part must be 'real' or 'imag', got {self.part!r}")
        if self.mu > self.nu or (self.part == "imag" and self.mu == self.nu):
            raise ValueError(f"invalid basis index {self}")

    def __str__(self) -> str:
        tag = "r" if self.part == "real" else "i"
        return f"A{tag}({self.mu},{self.nu})"


def basis_indices(d: int) -> list[BasisIndex]:
    """Canonical enumeration: ``(mu, nu)`` ascending with ``mu <= nu``, real before imag."""
    if d < 2:
        raise DimensionError(f"dimension must be >= 2, got {d}")
    out = []
    for mu in range(d):
        for nu in range(mu, d):
            out.append(BasisIndex(mu, nu, "real"))
            if mu < nu:
                out.append(BasisIndex(mu, nu, "imag"))
    return out


def basis_matrix(d: int, idx: BasisIndex) -> np.ndarray:
    e_mu, e_nu = basis_ket(d, idx.mu), basis_ket(d, idx.nu)
    a = np.outer(e_mu, e_nu.conj())
    b = np.outer(e_nu, e_mu.conj())
    if idx.part == "real":
        return 0.5 * (a + b)
    return (a - b) / 2j


def basis_matrices(d: int) -> np.ndarray:
    """All ``d**2`` basis operators stacked along axis 0."""
    return np.stack([basis_matrix(d, idx) for idx in basis_indices(d)])


def hermitian_basis(d: int) -> list[Observable]:
    """The ``d**2`` Hermitian operators spanning all d x d Hermitian matrices.

    ``A_r(mu,nu) = (|mu><nu| + |nu><mu|) / 2`` and
    ``A_i(mu,nu) = (|mu><nu| - |nu><mu|) / 2i`` in canonical order.
    """
    return [
        Observable.from_matrix(basis_matrix(d, idx), label=str(idx))
        for idx in basis_indices(d)
    ]


_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_matrix(axis: str) -> np.ndarray:
    try:
        return _PAULI[axis].copy()
    except KeyError:
        raise ValueError(f"axis must be one of 'x', 'y', 'z', got {axis!r}") from None


def pauli(axis: str) -> Observable:
    return Observable.from_matrix(pauli_matrix(axis), label=f"sigma_{axis}", outcomes=("+", "-"))


def singlet_ket() -> np.ndarray:
    """(|01> - |10>) / sqrt(2)"""
    k = np.zeros(4, dtype=complex)
    k[1], k[2] = 1.0, -1.0
    return k / math.sqrt(2.0)


def singlet_projector_matrix() -> np.ndarray:
    sxx = tensor(_PAULI["x"], _PAULI["x"])
    syy = tensor(_PAULI["y"], _PAULI["y"])
    szz = tensor(_PAULI["z"], _PAULI["z"])
    return 0.25 * (np.eye(4) - sxx - syy - szz)


def singlet_projector() -> Observable:
    """``(1 - sx⊗sx - sy⊗sy - sz⊗sz) / 4``, the projector onto the singlet."""
    return Observable.from_matrix(singlet_projector_matrix(), label="P_singlet")


def rotated_qubit_pair(theta: float) -> tuple[np.ndarray, np.ndarray]:
    """Real rotation of the computational basis by ``theta``.

    Returns ``(cos t |0> + sin t |1>, -sin t |0> + cos t |1>)``.
    """
    c, s = math.cos(theta), math.sin(theta)
    return np.array([c, s], dtype=complex), np.array([-s, c], dtype=complex)


def projector_matrix(k) -> np.ndarray:
    k = as_ket(k)
    norm2 = float(np.vdot(k, k).real)
    if norm2 <= 0.0:
        raise InvalidStateError("cannot project onto the zero vector")
    return np.outer(k, k.conj()) / norm2


def projector(k, label: str = "") -> Observable:
    """Rank-one projector ``|k><k| / <k|k>``."""
    p = projector_matrix(k)
    d = p.shape[0]
    return Observable.from_projectors(
        (1.0, 0.0), (p, np.eye(d) - p), label=label, outcomes=("1", "0")
    )


def basis_observable(kets: Sequence, label: str = "", outcomes: Sequence[str] = ()) -> Observable:
    """Projective measurement onto an orthonormal basis, outcome ``k`` valued ``k``.

    The outcome order follows the order of ``kets``.
    """
    projs = [projector_matrix(k) for k in kets]
    return Observable.from_projectors(
        tuple(float(i) for i in range(len(projs))), projs, label=label, outcomes=outcomes
    )
