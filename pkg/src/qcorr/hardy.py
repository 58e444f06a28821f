"""
Hardy's two-qubit state and the inconsistency of its conditional distributions.

Each qubit carries two observables, "1" and "2" (primed on the second
qubit), each with eigenstates labelled R and G. Observable 1 measures in the
computational basis; observable 2 in the basis rotated by the side's angle.
The state

    |Psi> ∝ |2R,2'R> - |1R,1'R> <1R,1'R|2R,2'R>

has p(1R,1'R) = p(1G,2'G) = p(2G,1'G) = 0 while p(2G,2'G) > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .correlations import (
    JointDistribution,
    conditional,
    joint_distribution,
    marginal_consistency_report,
)
from .errors import DegenerateAngleError, InvalidStateError, UndefinedConditionalError
from .linalg import as_ket, basis_ket
from .operators import Observable, projector_matrix, rotated_qubit_pair

ANGLE_EPS = 1e-9
VERDICT_TOL = 1e-10
WITNESS_FLOOR = 1e-6
TABLE_NAMES = ("11'", "12'", "21'", "22'")


def _side_kets(theta: float) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    return {
        "1": (basis_ket(2, 0), basis_ket(2, 1)),
        "2": rotated_qubit_pair(theta),
    }


def _check_angle(theta: float, name: str) -> None:
    if abs(math.cos(theta)) <= ANGLE_EPS or abs(math.sin(theta)) <= ANGLE_EPS:
        raise DegenerateAngleError(
            f"{name} = {theta!r} makes the two bases identical or orthogonal"
        )


def _observable(kets: tuple[np.ndarray, np.ndarray], label: str) -> Observable:
    r, g = kets
    return Observable.from_projectors(
        (1.0, -1.0), (projector_matrix(r), projector_matrix(g)), label=label, outcomes=("R", "G")
    )


@dataclass(frozen=True, eq=False)
class HardyInstance:
    theta_unprimed: float
    theta_primed: float
    state: np.ndarray
    overlap: float = field(init=False)

    def __post_init__(self):
        _check_angle(self.theta_unprimed, "theta_unprimed")
        _check_angle(self.theta_primed, "theta_primed")
        state = as_ket(self.state, "state")
        if state.size != 4:
            raise InvalidStateError("Hardy state must be a two-qubit ket")
        if abs(np.linalg.norm(state) - 1.0) > 1e-12:
            raise InvalidStateError("Hardy state must be normalized")
        state.setflags(write=False)
        object.__setattr__(self, "state", state)
        object.__setattr__(
            self, "overlap", math.cos(self.theta_unprimed) * math.cos(self.theta_primed)
        )

    def kets(self, side: int, which: str) -> tuple[np.ndarray, np.ndarray]:
        """(R, G) eigenkets of observable ``which`` ("1" or "2") on ``side`` (0 or 1)."""
        theta = self.theta_unprimed if side == 0 else self.theta_primed
        return _side_kets(theta)[which]

    def observables(self) -> dict[str, Observable]:
        """Keys "1", "2", "1'", "2'"."""
        out = {}
        for side, prime in ((0, ""), (1, "'")):
            for which in ("1", "2"):
                out[which + prime] = _observable(self.kets(side, which), which + prime)
        return out


def hardy_state(theta_unprimed: float, theta_primed: float | None = None) -> HardyInstance:
    """Normalized Hardy state for the given rotation angles.

    The primed angle defaults to the unprimed one.
    """
    if theta_primed is None:
        theta_primed = theta_unprimed
    _check_angle(theta_unprimed, "theta_unprimed")
    _check_angle(theta_primed, "theta_primed")
    r1, _ = _side_kets(theta_unprimed)["1"]
    r2, _ = _side_kets(theta_unprimed)["2"]
    r1p, _ = _side_kets(theta_primed)["1"]
    r2p, _ = _side_kets(theta_primed)["2"]
    ket_22 = np.kron(r2, r2p)
    ket_11 = np.kron(r1, r1p)
    psi = ket_22 - ket_11 * np.vdot(ket_11, ket_22)
    psi = psi / np.linalg.norm(psi)
    return HardyInstance(float(theta_unprimed), float(theta_primed), psi)


def hardy_joint_tables(h: HardyInstance) -> dict[str, JointDistribution]:
    """The four joint tables keyed "11'", "12'", "21'", "22'"."""
    obs = h.observables()
    w = np.outer(h.state, h.state.conj())
    return {
        name: joint_distribution(w, [obs[name[0]], obs[name[1:]]])
        for name in TABLE_NAMES
    }


@dataclass(frozen=True)
class ParadoxReport:
    theta_unprimed: float
    theta_primed: float
    zero_probs: dict[str, float]
    witness_prob: float
    chain: dict[str, float | None]
    implied: dict[str, float]
    measured: dict[str, float | None]
    verdict: bool
    tol: float

    def to_dict(self) -> dict:
        return {
            "theta_unprimed": self.theta_unprimed,
            "theta_primed": self.theta_primed,
            "zero_probs": dict(self.zero_probs),
            "witness": {"p(2G,2'G)": self.witness_prob},
            "chain": dict(self.chain),
            "implied": dict(self.implied),
            "measured": dict(self.measured),
            "verdict": self.verdict,
            "tol": self.tol,
        }


def _cond(jd: JointDistribution, axis: int, given: str, outcome: str) -> float | None:
    try:
        return conditional(jd, axis, given).prob(outcome)
    except UndefinedConditionalError:
        return None


def paradox_report(h: HardyInstance, tol: float = VERDICT_TOL,
                   witness_floor: float = WITNESS_FLOOR) -> ParadoxReport:
    """Zero pattern, witness and conditional chain for a Hardy instance.

    The verdict is True when the three engineered zeros hold, the witness
    exceeds ``max(tol, witness_floor)`` and every conditional in the chain
    equals 1 within ``tol``. The chain implies ``p(2R|2'G) = 1``, which the
    measured ``p(2G|2'G) > 0`` contradicts. Conditionals on a zero-probability
    outcome are reported as None and make the verdict False.
    """
    t = hardy_joint_tables(h)
    zeros = {
        "p(1R,1'R)": t["11'"].prob("R", "R"),
        "p(1G,2'G)": t["12'"].prob("G", "G"),
        "p(2G,1'G)": t["21'"].prob("G", "G"),
    }
    witness = t["22'"].prob("G", "G")
    chain = {
        "p(1R|2'G)": _cond(t["12'"], 1, "G", "R"),
        "p(1'G|1R)": _cond(t["11'"], 0, "R", "G"),
        "p(2R|1'G)": _cond(t["21'"], 1, "G", "R"),
    }
    measured = {
        "p(2R|2'G)": _cond(t["22'"], 1, "G", "R"),
        "p(2G|2'G)": _cond(t["22'"], 1, "G", "G"),
    }
    verdict = (
        all(v <= tol for v in zeros.values())
        and witness > max(tol, witness_floor)
        and all(v is not None and abs(v - 1.0) <= tol for v in chain.values())
    )
    return ParadoxReport(
        h.theta_unprimed,
        h.theta_primed,
        zeros,
        witness,
        chain,
        {"p(2R|2'G)": 1.0},
        measured,
        bool(verdict),
        tol,
    )


def hardy_consistency(h: HardyInstance, tol: float = 1e-10) -> float:
    """Largest marginal deviation over both sides' observable and partner choices."""
    obs = h.observables()
    w = np.outer(h.state, h.state.conj())
    worst = 0.0
    for target, mine, theirs in ((0, ("1", "2"), ("1'", "2'")), (1, ("1'", "2'"), ("1", "2"))):
        report = marginal_consistency_report(
            w, target, [(obs[o],) for o in theirs], [obs[o] for o in mine], tol=tol
        )
        worst = max(worst, report.max_deviation)
    return worst


def _witness_grid(theta_u: np.ndarray, theta_p: np.ndarray) -> np.ndarray:
    """p(2G,2'G) on a mesh, by Born evaluation of explicitly built kets."""
    tu, tp = np.meshgrid(theta_u, theta_p, indexing="ij")
    cu, su, cp, sp = np.cos(tu), np.sin(tu), np.cos(tp), np.sin(tp)
    zero, one = np.zeros_like(tu), np.ones_like(tu)
    # kets indexed [..., 4] in the |00>,|01>,|10>,|11> order
    r2u, r2p = np.stack([cu, su], axis=-1), np.stack([cp, sp], axis=-1)
    g2u, g2p = np.stack([-su, cu], axis=-1), np.stack([-sp, cp], axis=-1)
    ket_22 = np.einsum("...a,...b->...ab", r2u, r2p).reshape(*tu.shape, 4)
    ket_11 = np.stack([one, zero, zero, zero], axis=-1)
    overlap = np.sum(ket_11 * ket_22, axis=-1, keepdims=True)
    psi = ket_22 - overlap * ket_11
    psi = psi / np.linalg.norm(psi, axis=-1, keepdims=True)
    probe = np.einsum("...a,...b->...ab", g2u, g2p).reshape(*tu.shape, 4)
    return np.abs(np.sum(probe * psi, axis=-1)) ** 2


def maximize_paradox(grid_size: int) -> tuple[float, float, float]:
    """Grid search for the largest p(2G,2'G) over (0, pi/2)^2.

    Cell centres of a ``grid_size`` x ``grid_size`` mesh are scanned, then a
    mesh of the same size spanning one cell either side of the best point is
    scanned once more. Ties go to the lowest grid index.
    """
    if grid_size < 8:
        raise ValueError("grid_size must be >= 8")
    step = (math.pi / 2) / grid_size
    thetas = (np.arange(grid_size) + 0.5) * step
    p = _witness_grid(thetas, thetas)
    i, j = np.unravel_index(int(np.argmax(p)), p.shape)
    lo_u, hi_u = max(thetas[i] - step, step / 2), min(thetas[i] + step, math.pi / 2 - step / 2)
    lo_p, hi_p = max(thetas[j] - step, step / 2), min(thetas[j] + step, math.pi / 2 - step / 2)
    fine_u = np.linspace(lo_u, hi_u, grid_size)
    fine_p = np.linspace(lo_p, hi_p, grid_size)
    q = _witness_grid(fine_u, fine_p)
    k, m = np.unravel_index(int(np.argmax(q)), q.shape)
    if q[k, m] >= p[i, j]:
        return float(fine_u[k]), float(fine_p[m]), float(q[k, m])
    return float(thetas[i]), float(thetas[j]), float(p[i, j])
