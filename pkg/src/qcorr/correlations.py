"""
Means of product observables and joint outcome distributions.

A joint distribution is the table ``p(o_1, ..., o_n) = tr(W P_1 ⊗ ... ⊗ P_n)``
over the spectral projectors of one observable per subsystem. Its axes keep
the observable labels and outcome labels so tables stay readable when
written to disk.
"""

from __future__ import annotations

import io
import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, UndefinedConditionalError
from .linalg import DEFAULT_TOL, as_square, check_partition, tensor
from .operators import Observable, identity

CLAMP_TOL = 1e-12
NEGATIVE_ERROR_TOL = 1e-8
SUM_TOL = 1e-10
CONDITIONAL_THRESHOLD = 1e-12
CONSISTENCY_TOL = 1e-10


def format_float(x: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    x = float(x)
    if not np.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    return f"{x + 0.0:.17g}"


def _clean_probs(p: np.ndarray) -> np.ndarray:
    p = np.real(np.asarray(p, dtype=complex)).astype(float)
    low = float(p.min()) if p.size else 0.0
    if low < -NEGATIVE_ERROR_TOL:
        raise ValueError(f"probability {low:.3e} is negative beyond rounding")
    # + 0.0 turns -0.0 into 0.0
    return np.where(p < 0.0, 0.0, p) + 0.0


@dataclass(frozen=True)
class Axis:
    """One subsystem's measured observable and its outcome labels."""

    label: str
    outcomes: tuple[str, ...]

    def index(self, outcome) -> int:
        if isinstance(outcome, (int, np.integer)):
            if not 0 <= outcome < len(self.outcomes):
                raise IndexError(f"outcome index {outcome} out of range for axis {self.label!r}")
            return int(outcome)
        try:
            return self.outcomes.index(str(outcome))
        except ValueError:
            raise KeyError(f"axis {self.label!r} has no outcome {outcome!r}") from None


class _Table:
    axes: tuple[Axis, ...]
    probs: np.ndarray

    def prob(self, *outcomes) -> float:
        """Look up one cell by outcome labels (or integer positions)."""
        if len(outcomes) != len(self.axes):
            raise ValueError(f"need {len(self.axes)} outcomes, got {len(outcomes)}")
        idx = tuple(ax.index(o) for ax, o in zip(self.axes, outcomes))
        return float(self.probs[idx])

    def rows(self) -> Iterable[tuple[tuple[str, ...], float]]:
        """Cells in canonical (row-major) order."""
        for idx in itertools.product(*(range(len(ax.outcomes)) for ax in self.axes)):
            labels = tuple(ax.outcomes[i] for ax, i in zip(self.axes, idx))
            yield labels, float(self.probs[idx])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join([ax.label for ax in self.axes] + ["probability"]) + "\n")
        for labels, p in self.rows():
            buf.write(",".join(list(labels) + [format_float(p)]) + "\n")
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "axes": [{"label": ax.label, "outcomes": list(ax.outcomes)} for ax in self.axes],
            "probabilities": [
                {"outcomes": list(labels), "p": p} for labels, p in self.rows()
            ],
        }


@dataclass(frozen=True, eq=False)
class JointDistribution(_Table):
    axes: tuple[Axis, ...]
    probs: np.ndarray

    def __post_init__(self):
        probs = _clean_probs(self.probs)
        shape = tuple(len(ax.outcomes) for ax in self.axes)
        if probs.shape != shape:
            raise DimensionError(f"probability table shape {probs.shape} != axes shape {shape}")
        total = float(probs.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        probs.setflags(write=False)
        object.__setattr__(self, "axes", tuple(self.axes))
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_dict(cls, data: dict) -> "JointDistribution":
        axes = tuple(Axis(a["label"], tuple(a["outcomes"])) for a in data["axes"])
        probs = np.zeros(tuple(len(a.outcomes) for a in axes))
        for row in data["probabilities"]:
            idx = tuple(ax.index(o) for ax, o in zip(axes, row["outcomes"]))
            probs[idx] = float(row["p"])
        return cls(axes, probs)


@dataclass(frozen=True, eq=False)
class ConditionalDistribution(_Table):
    """Distribution over the remaining axes given one outcome on ``given_axis``."""

    given_axis: int
    given_label: str
    given_outcome: str
    axes: tuple[Axis, ...]
    probs: np.ndarray

    def __post_init__(self):
        probs = _clean_probs(self.probs)
        total = float(probs.sum())
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"conditional probabilities sum to {total!r}, not 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)


def _resolve(observables: Sequence, dims: Sequence[int] | None) -> list[Observable]:
    if dims is None:
        if any(o is None for o in observables):
            raise DimensionError("dims are required when identity placeholders are used")
        dims = [o.dim if isinstance(o, Observable) else np.asarray(o).shape[0] for o in observables]
    dims = check_partition(dims)
    if len(dims) != len(observables):
        raise DimensionError(
            f"{len(observables)} observables given for {len(dims)} subsystems"
        )
    out = []
    for i, (o, d) in enumerate(zip(observables, dims)):
        if o is None:
            o = identity(d)
        elif not isinstance(o, Observable):
            o = Observable.from_matrix(o)
        if o.dim != d:
            raise DimensionError(f"observable {i} has dimension {o.dim}, subsystem has {d}")
        out.append(o)
    return out


def _check_state(w, obs: list[Observable]) -> np.ndarray:
    w = as_square(w, "w")
    total = int(np.prod([o.dim for o in obs]))
    if w.shape[0] != total:
        raise DimensionError(f"state dimension {w.shape[0]} != product of subsystem dims {total}")
    return w


def product_mean(w, observables: Sequence, dims: Sequence[int] | None = None,
                 return_residue: bool = False):
    """Mean ``tr(W O_1 ⊗ O_2 ⊗ ...)`` of a product observable.

    ``None`` entries stand for the identity on that subsystem (``dims`` must
    then be given). With ``return_residue`` the imaginary part of the trace,
    which is rounding noise for Hermitian input, is returned alongside.
    """
    obs = _resolve(observables, dims)
    w = _check_state(w, obs)
    val = np.trace(w @ tensor(*(o.matrix for o in obs)))
    if return_residue:
        return float(val.real), float(abs(val.imag))
    return float(val.real)


def joint_distribution(w, observables: Sequence, dims: Sequence[int] | None = None) -> JointDistribution:
    """Born-rule table of joint outcomes for one observable per subsystem."""
    obs = _resolve(observables, dims)
    w = _check_state(w, obs)
    shape = tuple(len(o.projectors) for o in obs)
    probs = np.zeros(shape)
    for idx in itertools.product(*(range(n) for n in shape)):
        proj = tensor(*(o.projectors[i] for o, i in zip(obs, idx)))
        probs[idx] = np.real(np.einsum("ij,ji->", w, proj))
    axes = tuple(Axis(o.label or f"O{k}", o.outcomes) for k, o in enumerate(obs))
    return JointDistribution(axes, probs)


def marginal(jd: JointDistribution, keep: Iterable[int]) -> JointDistribution:
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one axis")
    n = len(jd.axes)
    if keep[0] < 0 or keep[-1] >= n:
        raise IndexError(f"axis indices {keep} out of range for {n} axes")
    drop = tuple(i for i in range(n) if i not in keep)
    probs = jd.probs.sum(axis=drop) if drop else jd.probs.copy()
    return JointDistribution(tuple(jd.axes[i] for i in keep), probs)


def conditional(jd: JointDistribution, axis: int, outcome,
                threshold: float = CONDITIONAL_THRESHOLD) -> ConditionalDistribution:
    """``p(rest | axis = outcome) = p(rest, outcome) / p(outcome)``.

    Raises
    ------
    UndefinedConditionalError
        When ``p(outcome)`` does not exceed ``threshold``.
    """
    if len(jd.axes) < 2:
        raise ValueError("conditioning needs at least two axes")
    ax = jd.axes[axis]
    k = ax.index(outcome)
    slab = np.take(jd.probs, k, axis=axis)
    p_given = float(slab.sum())
    if p_given <= threshold:
        raise UndefinedConditionalError(
            f"conditional undefined: p({ax.label}={ax.outcomes[k]}) = {p_given:.3e}"
        )
    rest = tuple(a for i, a in enumerate(jd.axes) if i != axis)
    return ConditionalDistribution(axis, ax.label, ax.outcomes[k], rest, slab / p_given)


def is_trivial(jd: JointDistribution, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """Does the table factorize into its single-axis marginals?

    Returns the verdict and the largest ``|p - prod(marginals)|``.
    """
    n = len(jd.axes)
    if n < 2:
        raise ValueError("triviality needs at least two axes")
    product = np.ones(())
    for i in range(n):
        product = np.multiply.outer(product, marginal(jd, [i]).probs)
    deviation = float(np.max(np.abs(jd.probs - product)))
    return deviation <= tol, deviation


@dataclass(frozen=True, eq=False)
class ConsistencyReport:
    target: int
    max_deviation: float
    marginals: dict[str, list[np.ndarray]]
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tol


def marginal_consistency_report(
    w,
    target: int,
    partner_choices: Sequence[Sequence],
    target_observables: Sequence,
    dims: Sequence[int] | None = None,
    tol: float = CONSISTENCY_TOL,
) -> ConsistencyReport:
    """Compare the target subsystem's marginals across partner choices.

    Each element of ``partner_choices`` lists one observable for every
    subsystem other than ``target``, in subsystem order. For every target
    observable the target marginal is computed under each partner choice;
    the report carries the largest pairwise difference.
    """
    w = as_square(w, "w")
    targets = [o if isinstance(o, Observable) else Observable.from_matrix(o) for o in target_observables]
    if not targets or not partner_choices:
        raise ValueError("need at least one target observable and one partner choice")
    marginals: dict[str, list[np.ndarray]] = {}
    deviation = 0.0
    for t_idx, t_obs in enumerate(targets):
        key = t_obs.label or f"target{t_idx}"
        found = []
        for partners in partner_choices:
            partners = list(partners)
            obs = partners[:target] + [t_obs] + partners[target:]
            jd = joint_distribution(w, obs, dims)
            found.append(marginal(jd, [target]).probs)
        for a, b in itertools.combinations(found, 2):
            deviation = max(deviation, float(np.max(np.abs(a - b))))
        marginals[key] = found
    return ConsistencyReport(target, deviation, marginals, tol)
