"""
Measurement as correlation-building between a specimen and an apparatus.

The apparatus starts in its ready state ``|a_r>``; the correlating unitary
sends ``|s_i> ⊗ |a_r>`` to ``|s_i> ⊗ |a_i>``. Pointer state ``a_j`` is the
apparatus basis vector at index ``(ready + j) mod apparatus_dim``, which
makes the unitary a controlled cyclic shift on the whole space.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .correlations import Axis, JointDistribution
from .errors import DimensionError, InvalidStateError
from .linalg import as_ket, dagger, partial_trace, unitary_fractional_power
from .states import purity

ALPHA_NORM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class MeasurementSetup:
    specimen_dim: int
    apparatus_dim: int
    ready_index: int
    unitary: np.ndarray

    @property
    def dims(self) -> tuple[int, int]:
        return (self.specimen_dim, self.apparatus_dim)

    def pointer_index(self, j: int) -> int:
        """Apparatus basis index of the pointer state for outcome ``j``."""
        return (self.ready_index + j) % self.apparatus_dim

    def pointer_ket(self, j: int) -> np.ndarray:
        a = np.zeros(self.apparatus_dim, dtype=complex)
        a[self.pointer_index(j)] = 1.0
        return a


def build_setup(specimen_dim: int, apparatus_dim: int, ready_index: int = 0) -> MeasurementSetup:
    """Controlled cyclic shift ``|s_i, a_j> -> |s_i, a_(j+i) mod D>``.

    Exact permutation matrix; at (2, 2, 0) it is the CNOT gate.
    """
    if specimen_dim < 2:
        raise DimensionError("specimen dimension must be >= 2")
    if apparatus_dim < specimen_dim:
        raise DimensionError(
            f"apparatus dimension {apparatus_dim} < specimen dimension {specimen_dim}"
        )
    if not 0 <= ready_index < apparatus_dim:
        raise DimensionError(f"ready index {ready_index} outside apparatus dimension")
    n, m = specimen_dim, apparatus_dim
    u = np.zeros((n * m, n * m), dtype=complex)
    for i in range(n):
        for j in range(m):
            u[i * m + (j + i) % m, i * m + j] = 1.0
    u.setflags(write=False)
    return MeasurementSetup(n, m, ready_index, u)


def _alphas(setup: MeasurementSetup, alphas: Sequence[complex]) -> np.ndarray:
    a = as_ket(alphas, "alphas")
    if a.size != setup.specimen_dim:
        raise DimensionError(f"{a.size} coefficients for a {setup.specimen_dim}-dim specimen")
    norm = float(np.linalg.norm(a))
    if abs(norm - 1.0) > ALPHA_NORM_TOL:
        raise InvalidStateError(f"coefficients are not normalized (norm {norm:.12g})")
    return a


def initial_state(setup: MeasurementSetup, alphas: Sequence[complex]) -> np.ndarray:
    """``(sum_i alpha_i |s_i>) ⊗ |a_ready>``"""
    a = _alphas(setup, alphas)
    ready = np.zeros(setup.apparatus_dim, dtype=complex)
    ready[setup.ready_index] = 1.0
    return np.kron(a, ready)


def final_state(setup: MeasurementSetup, alphas: Sequence[complex]) -> np.ndarray:
    return setup.unitary @ initial_state(setup, alphas)


def _check_ket(final, setup: MeasurementSetup) -> np.ndarray:
    f = as_ket(final, "final")
    if f.size != setup.specimen_dim * setup.apparatus_dim:
        raise DimensionError(
            f"state has dimension {f.size}, setup expects "
            f"{setup.specimen_dim * setup.apparatus_dim}"
        )
    return f


def outcome_distribution(final, setup: MeasurementSetup) -> JointDistribution:
    """``p(s_i, a_j) = |<s_i, a_j|F>|^2`` with apparatus outcomes in pointer order."""
    f = _check_ket(final, setup).reshape(setup.dims)
    order = [setup.pointer_index(j) for j in range(setup.apparatus_dim)]
    probs = np.abs(f[:, order]) ** 2
    axes = (
        Axis("s", tuple(f"s{i}" for i in range(setup.specimen_dim))),
        Axis("a", tuple(f"a{j}" for j in range(setup.apparatus_dim))),
    )
    return JointDistribution(axes, probs)


def specimen_post_state(final, setup: MeasurementSetup) -> np.ndarray:
    f = _check_ket(final, setup)
    return partial_trace(np.outer(f, f.conj()), setup.dims, [0])


def apparatus_post_state(final, setup: MeasurementSetup) -> np.ndarray:
    """Apparatus reduced state in the apparatus basis (not reordered)."""
    f = _check_ket(final, setup)
    return partial_trace(np.outer(f, f.conj()), setup.dims, [1])


def cross_observables(setup: MeasurementSetup, i: int, j: int) -> tuple[np.ndarray, np.ndarray]:
    """``S_ij = |s_i><s_j| + h.c.`` and ``A_ij = |a_i><a_j| + h.c.`` on pointer states."""
    if i == j:
        raise ValueError("cross observables need i != j")
    n = setup.specimen_dim
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"indices ({i}, {j}) outside specimen dimension {n}")
    s = np.zeros((n, n), dtype=complex)
    s[i, j] = s[j, i] = 1.0
    ai, aj = setup.pointer_ket(i), setup.pointer_ket(j)
    a = np.outer(ai, aj.conj())
    return s, a + dagger(a)


def cross_phase_correlation(final, setup: MeasurementSetup, i: int = 0, j: int = 1) -> float:
    """``<F| S_ij ⊗ A_ij |F>``, which equals ``2 Re(conj(alpha_i) alpha_j)`` after measurement."""
    f = _check_ket(final, setup)
    s, a = cross_observables(setup, i, j)
    return float(np.real(np.vdot(f, np.kron(s, a) @ f)))


def evolve_partial(setup: MeasurementSetup, alphas: Sequence[complex], t: float) -> tuple[np.ndarray, float]:
    """State after the fraction ``t`` of the correlating evolution, and specimen purity.

    The path is ``U**t`` (principal branch) applied to the initial product
    state, so ``t = 0`` gives the product state and ``t = 1`` the final state.
    """
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    ket = unitary_fractional_power(setup.unitary, t) @ initial_state(setup, alphas)
    return ket, purity(specimen_post_state(ket, setup))


def undo_measurement(setup: MeasurementSetup, final) -> np.ndarray:
    """Apply the inverse coupling ``U^†``."""
    f = _check_ket(final, setup)
    return dagger(setup.unitary) @ f


def decoherence_trace(setup: MeasurementSetup, alphas: Sequence[complex], steps: int,
                      i: int = 0, j: int = 1) -> list[tuple[float, float, float]]:
    """``(t, purity(t), cross_phase_correlation(t))`` on ``steps + 1`` evenly spaced times."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    rows = []
    for k in range(steps + 1):
        t = k / steps
        ket, p = evolve_partial(setup, alphas, t)
        rows.append((t, p, cross_phase_correlation(ket, setup, i, j)))
    return rows
