"""Comparison allocators: conflict-aware random, greedy coloring, brute force."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .topology import SpectrumModel
from .utility import Assignment, UtilityKind, utility

# Upper bound on the enumeration space brute force will accept.
BRUTE_FORCE_CAP = 10_000_000


class AlgorithmKind(enum.Enum):
    ACS = "acs"
    CSGC = "csgc"
    RANDOM = "random"
    EXACT = "exact"


class CapacityError(RuntimeError):
    """Raised when an exact search space exceeds the enumeration cap."""


def random_assignment(model: SpectrumModel, seed: int) -> Assignment:
    """Seeded random allocation, feasible by construction.

    Users are visited in a random order; each picks uniformly among its
    channels that are still conflict-free, or starves when none is left.
    """
    rng = np.random.default_rng(seed)
    n_users = model.n_users
    a = np.zeros((n_users, model.n_channels), dtype=np.uint8)
    occupied = np.zeros_like(a, dtype=bool)
    for n in rng.permutation(n_users):
        blocked = (model.interference[n] & occupied).any(axis=0)
        options = np.flatnonzero(model.availability[n] & ~blocked)
        if options.size:
            m = int(rng.choice(options))
            a[n, m] = 1
            occupied[n, m] = True
    return Assignment(a)


def _conflict_degrees(model: SpectrumModel, unassigned: np.ndarray) -> np.ndarray:
    """Per (user, channel) count of unassigned conflicting neighbors."""
    return np.einsum("nkm,k->nm", model.interference, unassigned.astype(np.int64))


def csgc_assignment(model: SpectrumModel, kind: UtilityKind) -> Assignment:
    """Greedy label-then-assign coloring, utility-matched scoring.

    The sum-reward objective scores a (user, channel) cell by its raw
    reward; the fairness objectives discount it by the cell's conflict
    degree. The top-labeled user takes its best channel, which is then
    pruned from every conflicting neighbor, until no positive label is
    left. Deterministic: ties go to the lowest index.
    """
    n_users, n_channels = model.n_users, model.n_channels
    avail = model.availability.copy()
    unassigned = np.ones(n_users, dtype=bool)
    a = np.zeros((n_users, n_channels), dtype=np.uint8)

    while unassigned.any():
        if kind is UtilityKind.MSR:
            score = np.where(avail, model.reward, 0.0)
        else:
            deg = _conflict_degrees(model, unassigned)
            score = np.where(avail, model.reward / (deg + 1), 0.0)
        score[~unassigned] = 0.0
        labels = score.max(axis=1)
        n = int(np.argmax(labels))
        if labels[n] <= 0.0:
            break
        m = int(np.argmax(score[n]))
        a[n, m] = 1
        unassigned[n] = False
        avail[model.interference[n, :, m], m] = False
    return Assignment(a)


@dataclass(frozen=True, eq=False)
class ExactResult:
    assignment: Assignment
    utility: float


def brute_force_optimal(
    model: SpectrumModel,
    kind: UtilityKind,
    per_user_cap: str = "single",
) -> ExactResult:
    """Exhaustive search over feasible assignments.

    "single" lets each user starve or take one available channel; "multi"
    enumerates every subset of its available channels. Among maximizers the
    lexicographically smallest flattened matrix wins. Raises CapacityError
    before searching when the unpruned space exceeds the cap.
    """
    if per_user_cap not in ("single", "multi"):
        raise ValueError(f"unknown per-user cap {per_user_cap!r}")
    n_users, n_channels = model.n_users, model.n_channels
    avail = [tuple(int(m) for m in np.flatnonzero(model.availability[n])) for n in range(n_users)]

    space = 1.0
    for channels in avail:
        space *= (1 + len(channels)) if per_user_cap == "single" else 2.0 ** len(channels)
        if space > BRUTE_FORCE_CAP:
            raise CapacityError(
                f"search space exceeds {BRUTE_FORCE_CAP} assignments; downscale the instance"
            )

    if per_user_cap == "single":
        choices = [((),) + tuple((m,) for m in channels) for channels in avail]
    else:
        choices = [_subsets(channels) for channels in avail]

    best_utility = float("-inf")
    best_key: tuple[int, ...] | None = None
    best_rows: list[tuple[int, ...]] | None = None
    rewards = np.zeros(n_users)
    taken: list[tuple[int, ...]] = []

    def row_of(chosen: tuple[int, ...]) -> tuple[int, ...]:
        row = [0] * n_channels
        for m in chosen:
            row[m] = 1
        return tuple(row)

    def recurse(n: int) -> None:
        nonlocal best_utility, best_key, best_rows
        if n == n_users:
            u = utility(rewards, kind)
            if u < best_utility:
                return
            key = tuple(x for chosen in taken for x in row_of(chosen))
            if u > best_utility or best_key is None or key < best_key:
                best_utility = u
                best_key = key
                best_rows = [row_of(chosen) for chosen in taken]
            return
        for chosen in choices[n]:
            ok = True
            for m in chosen:
                for k, earlier in enumerate(taken):
                    if m in earlier and model.interference[n, k, m]:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                continue
            rewards[n] = sum(model.reward[n, m] for m in chosen)
            taken.append(chosen)
            recurse(n + 1)
            taken.pop()
            rewards[n] = 0.0

    recurse(0)
    assert best_rows is not None  # the all-starved assignment is always feasible
    return ExactResult(Assignment(np.array(best_rows, dtype=np.uint8)), best_utility)


def _subsets(channels: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    out: list[tuple[int, ...]] = [()]
    for m in channels:
        out.extend(s + (m,) for s in list(out))
    return tuple(out)
