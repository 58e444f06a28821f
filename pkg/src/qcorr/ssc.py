"""
Subsystem correlations determine the state.

``correlation_table`` computes the mean of every product of canonical
Hermitian basis operators (one per subsystem). ``reconstruct`` inverts it:
each matrix element ``<nu,beta,...|W|mu,alpha,...>`` equals
``tr W (|mu><nu| ⊗ |alpha><beta| ⊗ ...)`` and every factor
``|mu><nu| = A_r(mu,nu) + i A_i(mu,nu)`` is a combination of basis
operators, so the element is a 2**n-term combination of table entries.

The purity criterion lives here as well: a mixed state admits an extension
with nontrivial external correlations (``purity_witness``), while a pure
reduced state forces the global state to factorize
(``verify_pure_implies_product``).
"""

from __future__ import annotations

import itertools
import math
import string
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .correlations import product_mean
from .errors import DimensionError, IncompleteTableError, InconsistentTableError
from .linalg import (
    DEFAULT_TOL,
    as_square,
    check_partition,
    dagger,
    partial_trace,
    tensor,
    validate_density,
)
from .operators import BasisIndex, Observable, basis_indices, basis_matrices, basis_matrix
from .states import eigen_mixture, require_density

TRACE_CONSISTENCY_TOL = 1e-6
RANK_CUTOFF = 1e-10
FACTORIZATION_TOL = 1e-9
SINGLET_TOL = 1e-10
PROBABILITY_SLACK = 1e-8


@dataclass(frozen=True, eq=False)
class CorrelationTable:
    """Means of all products of basis operators, one operator per subsystem.

    ``means[k1, ..., kn]`` is the mean for the basis operators at canonical
    positions ``k1 .. kn`` (see ``operators.basis_indices``).
    """

    dims: tuple[int, ...]
    means: np.ndarray

    def __post_init__(self):
        dims = check_partition(self.dims)
        means = np.array(self.means, dtype=float)
        expected = tuple(d * d for d in dims)
        if means.shape != expected:
            raise IncompleteTableError(
                f"table shape {means.shape} does not match {expected} for dims {list(dims)}"
            )
        if not np.all(np.isfinite(means)):
            raise ValueError("correlation table has non-finite means")
        means.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "means", means)

    def __len__(self) -> int:
        return self.means.size

    def __getitem__(self, ops) -> float:
        ops = tuple(ops)
        if len(ops) != len(self.dims):
            raise KeyError(f"need {len(self.dims)} basis indices, got {len(ops)}")
        pos = []
        for d, op in zip(self.dims, ops):
            if isinstance(op, BasisIndex):
                op = basis_indices(d).index(op)
            pos.append(int(op))
        return float(self.means[tuple(pos)])

    def to_dict(self) -> dict:
        entries = [
            {"ops": list(idx), "mean": float(self.means[idx])}
            for idx in itertools.product(*(range(d * d) for d in self.dims))
        ]
        return {"dims": list(self.dims), "entries": entries}

    @classmethod
    def from_dict(cls, data: dict) -> "CorrelationTable":
        """Parse the JSON form; every entry must be present exactly once."""
        try:
            dims = check_partition(data["dims"])
            entries = data["entries"]
        except (KeyError, TypeError) as exc:
            raise IncompleteTableError(f"malformed correlation table: {exc}") from None
        shape = tuple(d * d for d in dims)
        means = np.full(shape, np.nan)
        for e in entries:
            try:
                idx = tuple(int(k) for k in e["ops"])
                mean = float(e["mean"])
            except (KeyError, TypeError, ValueError) as exc:
                raise IncompleteTableError(f"malformed entry {e!r}: {exc}") from None
            if len(idx) != len(dims) or any(not 0 <= k < s for k, s in zip(idx, shape)):
                raise IncompleteTableError(f"entry ops {list(idx)} out of range")
            if not np.isnan(means[idx]):
                raise IncompleteTableError(f"duplicate entry for ops {list(idx)}")
            means[idx] = mean
        missing = int(np.isnan(means).sum())
        if missing:
            raise IncompleteTableError(
                f"incomplete table: {missing} of {means.size} entries missing"
            )
        return cls(dims, means)


def _einsum_letters(n: int) -> tuple[str, str, str]:
    letters = string.ascii_letters
    if 3 * n > len(letters):
        raise DimensionError(f"too many subsystems ({n})")
    return letters[:n], letters[n:2 * n], letters[2 * n:3 * n]


def correlation_table(w, dims: Sequence[int]) -> CorrelationTable:
    """Forward map: every ``tr W (A_k1 ⊗ ... ⊗ A_kn)`` over the canonical basis."""
    w = as_square(w, "w")
    dims = check_partition(dims, w.shape[0])
    n = len(dims)
    rows, cols, ks = _einsum_letters(n)
    t = w.reshape(dims + dims)
    # tr(W ⊗A) = sum W[a.., b..] prod A_i[b_i, a_i]
    operands = [t]
    subs = [rows + cols]
    for i, d in enumerate(dims):
        operands.append(basis_matrices(d))
        subs.append(ks[i] + cols[i] + rows[i])
    means = np.einsum(",".join(subs) + "->" + ks, *operands, optimize=True)
    return CorrelationTable(dims, means.real)


def correlation_entry(w, dims: Sequence[int], ops: Sequence[int]) -> float:
    """One table entry through ``product_mean``; slower, independent of the einsum path."""
    dims = check_partition(dims)
    obs = [basis_matrix(d, basis_indices(d)[k]) for d, k in zip(dims, ops)]
    return product_mean(w, obs, dims)


def _outer_coefficients(d: int) -> np.ndarray:
    """``C[mu, nu, k]`` with ``|mu><nu| = sum_k C[mu, nu, k] A_k``.

    For mu < nu this is ``A_r + i A_i``; for mu > nu it is ``A_r - i A_i`` of
    the swapped pair; on the diagonal only ``A_r`` contributes.
    """
    idx = basis_indices(d)
    pos = {(b.mu, b.nu, b.part): k for k, b in enumerate(idx)}
    c = np.zeros((d, d, d * d), dtype=complex)
    for mu in range(d):
        for nu in range(d):
            lo, hi = min(mu, nu), max(mu, nu)
            c[mu, nu, pos[(lo, hi, "real")]] = 1.0
            if mu < nu:
                c[mu, nu, pos[(lo, hi, "imag")]] = 1j
            elif mu > nu:
                c[mu, nu, pos[(lo, hi, "imag")]] = -1j
    return c


@dataclass(frozen=True, eq=False)
class Reconstruction:
    density: np.ndarray
    dims: tuple[int, ...]
    trace: float
    min_eigenvalue: float

    @property
    def trace_deviation(self) -> float:
        return abs(self.trace - 1.0)


def reconstruct_matrix(table: CorrelationTable) -> np.ndarray:
    """Assemble the density matrix from a complete table without validation."""
    dims = table.dims
    n = len(dims)
    mus, nus, ks = _einsum_letters(n)
    operands = [table.means.astype(complex)]
    subs = [ks]
    for i, d in enumerate(dims):
        operands.append(_outer_coefficients(d))
        subs.append(mus[i] + nus[i] + ks[i])
    # <nu..|W|mu..> = tr W |mu..><nu..|, rows indexed by nu
    elements = np.einsum(",".join(subs) + "->" + nus + mus, *operands, optimize=True)
    total = int(np.prod(dims))
    return elements.reshape(total, total)


def reconstruct(table: CorrelationTable, trace_tol: float = TRACE_CONSISTENCY_TOL) -> Reconstruction:
    """Rebuild the global density matrix from its correlation table.

    No positivity repair is attempted: the smallest eigenvalue is reported
    and left to the caller.

    Raises
    ------
    InconsistentTableError
        If the reconstructed trace differs from 1 by more than ``trace_tol``.
        The matrix is attached to the exception.
    """
    if not isinstance(table, CorrelationTable):
        raise IncompleteTableError("reconstruct needs a complete CorrelationTable")
    w = reconstruct_matrix(table)
    report = validate_density(w, np.inf)
    result = Reconstruction(w, table.dims, float(np.trace(w).real), report.min_eigenvalue)
    if result.trace_deviation > trace_tol:
        raise InconsistentTableError(
            f"inconsistent table: reconstructed trace {result.trace:.12g}", density=w
        )
    return result


def singlet_from_anticorrelations(cxx: float, cyy: float, czz: float,
                                  tol: float = SINGLET_TOL) -> tuple[float, bool]:
    """Mean of the singlet projector from the three like-component correlations.

    Returns ``(1 - cxx - cyy - czz) / 4`` and whether it certifies the
    singlet (value 1 within ``tol``).
    """
    for name, c in (("cxx", cxx), ("cyy", cyy), ("czz", czz)):
        if not -1.0 <= c <= 1.0:
            raise ValueError(f"{name} = {c} is outside [-1, 1]")
    mean = 0.25 * (1.0 - cxx - cyy - czz)
    return mean, abs(mean - 1.0) <= tol


@dataclass(frozen=True, eq=False)
class PurityWitness:
    """An extension of a mixed state exhibiting nontrivial external correlations.

    ``extension_state`` lives on ``extension_dims = (d1, rank)``; ``obs_a``
    acts on the original system and ``obs_b`` on the added one.
    """

    extension_state: np.ndarray
    extension_dims: tuple[int, int]
    obs_a: Observable
    obs_b: Observable
    weights: tuple[float, float]
    predicted_mean: float
    predicted_singles: tuple[float, float] = (0.0, 0.0)


def purity_witness(w1, tol: float = DEFAULT_TOL) -> PurityWitness | None:
    """Witness that ``w1`` is mixed, or ``None`` when it is pure.

    Purifies ``w1 = sum p_i |phi_i><phi_i|`` as
    ``|Psi> = sum sqrt(p_i) |phi_i> ⊗ |chi_i>`` with ``chi_i`` the standard
    basis of a ``rank``-dimensional partner. The observables
    ``|phi_1><phi_2| + h.c.`` and ``|chi_1><chi_2| + h.c.`` then have product
    mean ``2 sqrt(p1 p2)`` and vanishing single means. These values are
    checked before the witness is returned.
    """
    w1 = require_density(w1, tol)
    terms = [(p, k) for p, k in eigen_mixture(w1, tol) if p > RANK_CUTOFF]
    if len(terms) < 2:
        return None
    d1, rank = w1.shape[0], len(terms)
    psi = np.zeros(d1 * rank, dtype=complex)
    for i, (p, phi) in enumerate(terms):
        chi = np.zeros(rank, dtype=complex)
        chi[i] = 1.0
        psi += math.sqrt(p) * tensor(phi, chi)

    (p1, phi1), (p2, phi2) = terms[0], terms[1]
    a = np.outer(phi1, phi2.conj())
    a = a + dagger(a)
    b = np.zeros((rank, rank), dtype=complex)
    b[0, 1] = b[1, 0] = 1.0
    obs_a = Observable.from_matrix(a, label="A")
    obs_b = Observable.from_matrix(b, label="B")
    predicted = 2.0 * math.sqrt(p1 * p2)

    big = np.outer(psi, psi.conj())
    dims = (d1, rank)
    checks = {
        "product mean": (product_mean(big, [obs_a, obs_b]), predicted),
        "single mean A": (product_mean(big, [obs_a, None], dims), 0.0),
        "single mean B": (product_mean(big, [None, obs_b], dims), 0.0),
    }
    for name, (got, want) in checks.items():
        if abs(got - want) > tol:
            raise ArithmeticError(f"witness check failed: {name} {got!r} != {want!r}")
    if np.max(np.abs(partial_trace(big, dims, [0]) - w1)) > tol:
        raise ArithmeticError("witness extension does not reduce to the input state")
    return PurityWitness(psi, dims, obs_a, obs_b, (p1, p2), predicted)


@dataclass(frozen=True, eq=False)
class FactorizationReport:
    """Outcome of checking that a pure reduced state forces a product form.

    ``applicable`` is False when the kept reduction is mixed; ``deviation``
    is ``||W - P_phi ⊗ W_rest||_F`` (operands in subsystem order).
    """

    applicable: bool
    confirmed: bool
    deviation: float
    reduced_purity: float
    message: str


def verify_pure_implies_product(w, dims: Sequence[int], keep: int,
                                tol: float = DEFAULT_TOL,
                                factor_tol: float = FACTORIZATION_TOL) -> FactorizationReport:
    w = require_density(w, tol)
    dims = check_partition(dims, w.shape[0])
    if len(dims) != 2:
        raise DimensionError("verify_pure_implies_product needs a two-factor partition")
    if keep not in (0, 1):
        raise DimensionError(f"keep must be 0 or 1, got {keep}")
    other = 1 - keep
    w_keep = partial_trace(w, dims, [keep])
    w_other = partial_trace(w, dims, [other])
    vals = np.linalg.eigvalsh(0.5 * (w_keep + dagger(w_keep)))[::-1]
    reduced_purity = float(np.sum(vals ** 2))
    if len(vals) > 1 and vals[1] > RANK_CUTOFF:
        return FactorizationReport(False, False, float("nan"), reduced_purity,
                                   "criterion not applicable: mixed reduction")
    parts = [w_keep, w_other] if keep == 0 else [w_other, w_keep]
    deviation = float(np.linalg.norm(w - tensor(*parts)))
    confirmed = deviation <= factor_tol
    message = (
        "factorization confirmed: all external correlations trivial"
        if confirmed
        else f"factorization failed: deviation {deviation:.3e}"
    )
    return FactorizationReport(True, confirmed, deviation, reduced_purity, message)


def table_means_valid(table: CorrelationTable) -> bool:
    """Do products of projector-type (diagonal) basis elements have means in [0, 1]?"""
    diag = [
        [k for k, b in enumerate(basis_indices(d)) if b.mu == b.nu] for d in table.dims
    ]
    sub = table.means[np.ix_(*diag)]
    return bool(np.all(sub >= -PROBABILITY_SLACK) and np.all(sub <= 1 + PROBABILITY_SLACK))


__all__ = [
    "CorrelationTable",
    "FactorizationReport",
    "PurityWitness",
    "Reconstruction",
    "correlation_entry",
    "correlation_table",
    "purity_witness",
    "reconstruct",
    "reconstruct_matrix",
    "singlet_from_anticorrelations",
    "table_means_valid",
    "verify_pure_implies_product",
]
