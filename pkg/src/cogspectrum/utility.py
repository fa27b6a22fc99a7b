"""Channel assignments, conflict-freedom, and network-utility objectives."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .topology import SpectrumModel

# Additive shift applied inside the proportional-fair product so starved
# users do not annihilate it.
STARVATION_SHIFT = 1e-6


class DimensionMismatchError(ValueError):
    """Raised when an assignment and a model disagree on shape."""


class InfeasibleAssignmentError(ValueError):
    """Raised when a scored assignment violates availability or interference."""


class UtilityKind(enum.Enum):
    MSR = "msr"  # max sum reward
    MMR = "mmr"  # max min reward
    MPF = "mpf"  # max proportional fairness


@dataclass(frozen=True, eq=False)
class Assignment:
    """Binary (users x channels) allocation matrix."""

    a: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.a)
        if a.ndim != 2:
            raise DimensionMismatchError(f"assignment must be 2-D, got shape {a.shape}")
        if not np.isin(a, (0, 1)).all():
            raise ValueError("assignment entries must be 0 or 1")
        a = np.ascontiguousarray(a.astype(np.uint8))
        a.setflags(write=False)
        object.__setattr__(self, "a", a)

    @classmethod
    def zeros(cls, n_users: int, n_channels: int) -> "Assignment":
        return cls(np.zeros((n_users, n_channels), dtype=np.uint8))

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    def channel_of(self) -> list[int | None]:
        """Per-user assigned channel, None for starved users.

        Only meaningful for single-channel assignments; the lowest set
        channel is reported if a row carries several.
        """
        out: list[int | None] = []
        for row in self.a:
            hits = np.flatnonzero(row)
            out.append(int(hits[0]) if hits.size else None)
        return out


def _check_shape(assignment: Assignment, model: SpectrumModel) -> None:
    if assignment.a.shape != model.availability.shape:
        raise DimensionMismatchError(
            f"assignment shape {assignment.a.shape} does not match "
            f"model shape {model.availability.shape}"
        )


def is_feasible(assignment: Assignment, model: SpectrumModel) -> bool:
    """True iff the assignment respects availability and no conflicting
    pair shares a channel."""
    _check_shape(assignment, model)
    occupied = assignment.a.astype(bool)
    if (occupied & ~model.availability).any():
        return False
    for m in range(model.n_channels):
        active = np.flatnonzero(occupied[:, m])
        if active.size > 1 and model.interference[np.ix_(active, active)][:, :, m].any():
            return False
    return True


def reward_vector(assignment: Assignment, model: SpectrumModel) -> np.ndarray:
    """Per-user reward: row-wise inner product of assignment and reward."""
    _check_shape(assignment, model)
    return (assignment.a * model.reward).sum(axis=1)


def utility(r: np.ndarray, kind: UtilityKind) -> float:
    """Aggregate a reward vector into one of the three network objectives.

    The proportional-fair value is the geometric mean of shifted rewards,
    computed in log space so large populations do not underflow.
    """
    r = np.asarray(r, dtype=float)
    if r.ndim != 1 or r.size == 0:
        raise DimensionMismatchError("reward vector must be a nonempty 1-D array")
    if kind is UtilityKind.MSR:
        return float(r.sum())
    if kind is UtilityKind.MMR:
        return float(r.min())
    return float(np.exp(np.mean(np.log(r + STARVATION_SHIFT))))


def evaluate(assignment: Assignment, model: SpectrumModel, kind: UtilityKind) -> float:
    """Utility of a feasible assignment; infeasible input is an error."""
    if not is_feasible(assignment, model):
        raise InfeasibleAssignmentError(
            "assignment violates availability or interference constraints"
        )
    return utility(reward_vector(assignment, model), kind)
