"""Hierarchical ant-colony channel allocator.

Per iteration, one ant per colony member walks every channel: it picks a
neighborhood (NAN) with probability proportional to the summed appeal of
the gateways inside, then picks a gateway there. Both picks mix a greedy
argmax with roulette-wheel exploration. Deposits reinforce the walked
cells, the whole tensor evaporates multiplicatively at the end of each
iteration, and the final assignment is read off the iteration-averaged
pheromone with a conflict-repair pass that guarantees feasibility.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import AbstractSet, Callable, Sequence

import numpy as np

from .topology import SpectrumModel
from .utility import Assignment, reward_vector


class NoCandidateError(ValueError):
    """Raised when a selection is requested over an all-zero mass vector."""


INTERFERENCE_MODES = ("penalty", "smoothed", "literal")


@dataclass(frozen=True)
class AcsParams:
    """Colony controls.

    ``g_cap`` and ``g_prime`` gate the greedy/roulette split for the NAN
    and gateway picks; a uniform draw above the gate goes greedy.
    ``interference_mode`` sets how a gateway's conflict count enters its
    selection score: "penalty" (default) divides by 1 + conflicts so clean
    cells are preferred, "smoothed" multiplies by 1 + conflicts, and
    "literal" multiplies by the bare count, which starves conflict-free
    users. ``normalize_deposit`` divides rewards by the model maximum
    before the deposit exponent so deposits never exceed one.
    """

    n_ants: int = 15
    iterations: int = 100
    rho: float = 0.9
    g_cap: float = 0.9
    g_prime: float = 0.9
    interference_mode: str = "penalty"
    normalize_deposit: bool = True
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_ants < 1:
            raise ValueError(f"n_ants must be >= 1, got {self.n_ants}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        for name, v in (("rho", self.rho), ("g_cap", self.g_cap), ("g_prime", self.g_prime)):
            if not (0.0 < v < 1.0):
                raise ValueError(f"{name} must lie strictly inside (0, 1), got {v}")
        if self.interference_mode not in INTERFERENCE_MODES:
            raise ValueError(
                f"interference_mode must be one of {INTERFERENCE_MODES}, "
                f"got {self.interference_mode!r}"
            )


def _admit_all(i: int, j: int, m: int) -> int:
    return 1


@dataclass(frozen=True)
class AdmissionPolicy:
    """Binary gate deciding whether gateway j of NAN i may take channel m.

    The default admits everyone; guard-channel style policies plug in a
    custom predicate.
    """

    predicate: Callable[[int, int, int], int] = _admit_all

    def admits(self, i: int, j: int, m: int) -> bool:
        return bool(self.predicate(i, j, m))


@dataclass
class AntState:
    """One ant's walk memory: each (NAN, gateway) node is visitable once."""

    visited: set[tuple[int, int]] = field(default_factory=set)
    carried_channel: int = -1

    def visit(self, nan: int, hgw: int) -> None:
        node = (nan, hgw)
        if node in self.visited:
            raise ValueError(f"ant revisited node {node}")
        self.visited.add(node)


class PheromoneTensor:
    """Pheromone per (NAN, gateway-within-NAN, channel), one recorded slice
    per completed iteration.

    ``current`` is the working slice; ``record_iteration`` freezes it as the
    value of the just-finished iteration. Grouping is carried along so the
    tensor can map its cells back to global user ids.
    """

    def __init__(self, members: Sequence[Sequence[int]], n_channels: int):
        if not members or n_channels < 1:
            raise ValueError("need at least one NAN and one channel")
        self.members: tuple[tuple[int, ...], ...] = tuple(tuple(g) for g in members)
        self.n_channels = n_channels
        width = max((len(g) for g in self.members), default=0)
        width = max(width, 1)
        self.current = np.ones((len(self.members), width, n_channels))
        self._history: list[np.ndarray] = []
        self._history_sum = np.zeros_like(self.current)

    @property
    def n_nans(self) -> int:
        return len(self.members)

    @property
    def iterations_recorded(self) -> int:
        return len(self._history)

    def value(self, i: int, j: int, m: int) -> float:
        return float(self.current[i, j, m])

    def record_iteration(self) -> None:
        self._history.append(self.current.copy())
        self._history_sum += self.current

    def slice_at(self, iteration: int) -> np.ndarray:
        """Recorded slice for a 1-based iteration index."""
        return self._history[iteration - 1]

    def iteration_mean(self) -> np.ndarray:
        if not self._history:
            raise ValueError("no iterations recorded yet")
        return self._history_sum / len(self._history)


@dataclass(frozen=True)
class ConvergenceTrace:
    """Per-iteration view of a single allocator run.

    ``best_utility`` is the running best sum-reward of the feasible
    assignment read off the pheromone average after each iteration, so it
    is nondecreasing. ``normalized_cost`` rescales the per-iteration
    (non-cumulative) values into [0, 1], 1 at the worst iteration and 0 at
    the best; a flat run maps to all zeros.
    """

    seed: int
    best_utility: tuple[float, ...]
    normalized_cost: tuple[float, ...]
    converged_at: int  # first iteration whose best survives the confirmation window

    @property
    def iterations(self) -> int:
        return len(self.best_utility)

    def rows(self):
        """(iteration, best_utility, normalized_cost) triples, 1-based."""
        for xi, (b, c) in enumerate(zip(self.best_utility, self.normalized_cost), start=1):
            yield xi, b, c


@dataclass(frozen=True, eq=False)
class AcsResult:
    assignment: Assignment
    trace: ConvergenceTrace


def group_by_nan(nan_of: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    """Global user ids grouped per NAN, in id order within each group."""
    if len(nan_of) == 0:
        raise ValueError("nan map must cover at least one user")
    if any(i < 0 for i in nan_of):
        raise ValueError("nan ids must be nonnegative")
    groups: list[list[int]] = [[] for _ in range(max(nan_of) + 1)]
    for n, i in enumerate(nan_of):
        groups[i].append(n)
    return tuple(tuple(g) for g in groups)


def _conflict_factor(conflicts, mode: str):
    if mode == "penalty":
        return 1.0 / (conflicts + 1)
    if mode == "smoothed":
        return conflicts + 1
    return conflicts


def hgw_score(
    i: int,
    j: int,
    m: int,
    T: PheromoneTensor,
    model: SpectrumModel,
    params: AcsParams,
) -> float:
    """Selection appeal of gateway j in NAN i for channel m.

    Pheromone times the normalized reward, scaled by how many channels the
    user could use at all and by a factor of its conflict count within the
    NAN on this channel (see AcsParams.interference_mode). Zero when the
    channel is unavailable to the user.
    """
    n = T.members[i][j]
    if not model.availability[n, m]:
        return 0.0
    group = np.asarray(T.members[i])
    conflicts = int(model.interference[n, group, m].sum())
    kappa = _conflict_factor(conflicts, params.interference_mode)
    n_avail = int(model.availability[n].sum())
    denom = model.n_channels * len(group) * model.b_max
    return float(T.current[i, j, m] * model.reward[n, m] / denom * n_avail * kappa)


def nan_probabilities(
    m: int,
    T: PheromoneTensor,
    model: SpectrumModel,
    policy: AdmissionPolicy,
    params: AcsParams,
    visited: AbstractSet[tuple[int, int]] = frozenset(),
) -> np.ndarray:
    """Probability of each NAN for channel m.

    Mass is the sum of admitted, not-yet-visited gateway scores; the vector
    is normalized to one when any mass exists and all-zero otherwise.
    """
    mass = np.zeros(T.n_nans)
    for i, group in enumerate(T.members):
        total = 0.0
        for j in range(len(group)):
            if (i, j) in visited or not policy.admits(i, j, m):
                continue
            total += hgw_score(i, j, m, T, model, params)
        mass[i] = total
    grand = mass.sum()
    if grand <= 0.0:
        return mass
    return mass / grand


def select(p: np.ndarray, threshold: float, rng) -> int:
    """Pick an index from a nonnegative mass vector.

    A uniform draw above the threshold goes greedy (argmax, ties to the
    lowest index); otherwise a roulette wheel returns the first index whose
    cumulative normalized mass reaches a fresh uniform draw.
    """
    p = np.asarray(p, dtype=float)
    total = p.sum()
    if total <= 0.0:
        raise NoCandidateError("selection over an all-zero mass vector")
    g = rng.random()
    if g > threshold:
        return int(np.argmax(p))
    cum = np.cumsum(p / total)
    u = rng.random()
    idx = int(np.searchsorted(cum, u, side="left"))
    return min(idx, p.size - 1)


def deposit_amount(n: int, m: int, model: SpectrumModel, params: AcsParams) -> float:
    """Pheromone laid for user n on channel m.

    The (possibly max-normalized) reward is raised to M / A_n where A_n is
    the user's count of available channels, so scarce users weight their
    deposits differently from flexible ones. Zero when the channel is
    unavailable (which covers users with no channels at all).
    """
    if not model.availability[n, m]:
        return 0.0
    n_avail = int(model.availability[n].sum())
    base = float(model.reward[n, m])
    if params.normalize_deposit:
        base /= model.b_max
    return float(base ** (model.n_channels / n_avail))


def semi_local_update(
    T: PheromoneTensor,
    selected_nan: int,
    m: int,
    model: SpectrumModel,
    params: AcsParams,
) -> PheromoneTensor:
    """Deposit on every gateway of the selected NAN for channel m."""
    group = T.members[selected_nan]
    for j, n in enumerate(group):
        T.current[selected_nan, j, m] += deposit_amount(n, m, model, params)
    return T


def local_update(
    T: PheromoneTensor,
    selected_nan: int,
    selected_hgw: int,
    m: int,
    model: SpectrumModel,
    params: AcsParams,
) -> PheromoneTensor:
    """Deposit on the single selected gateway for channel m."""
    n = T.members[selected_nan][selected_hgw]
    T.current[selected_nan, selected_hgw, m] += deposit_amount(n, m, model, params)
    return T


def global_evaporation(T: PheromoneTensor, params: AcsParams) -> PheromoneTensor:
    """Multiply every working entry by the evaporation coefficient."""
    T.current *= params.rho
    return T


def final_selection(
    T: PheromoneTensor,
    model: SpectrumModel,
    admitted: np.ndarray | None = None,
) -> Assignment:
    """Feasible assignment read off the iteration-averaged pheromone.

    Users are processed in descending order of their best mean level; each
    tries its channels in descending mean level and takes the first one
    that is available, admitted, and conflict-free against users already
    placed. Users left without such a channel starve.
    """
    return _assign_from_pheromone(T.iteration_mean(), T.members, model, admitted)


def _assign_from_pheromone(
    mean: np.ndarray,
    members: tuple[tuple[int, ...], ...],
    model: SpectrumModel,
    admitted: np.ndarray | None = None,
) -> Assignment:
    n_users, n_channels = model.n_users, model.n_channels
    user_level = np.zeros((n_users, n_channels))
    usable = np.asarray(model.availability)
    if admitted is not None:
        usable = usable & admitted
    for i, group in enumerate(members):
        for j, n in enumerate(group):
            user_level[n] = mean[i, j]

    a = np.zeros((n_users, n_channels), dtype=np.uint8)
    order = np.argsort(-user_level.max(axis=1), kind="stable")
    for n in order:
        for m in np.argsort(-user_level[n], kind="stable"):
            if not usable[n, m]:
                continue
            holders = np.flatnonzero(a[:, m])
            if holders.size and model.interference[n, holders, m].any():
                continue
            a[n, m] = 1
            break
    return Assignment(a)


def _selection_grid(
    members: tuple[tuple[int, ...], ...],
    model: SpectrumModel,
    policy: AdmissionPolicy,
    params: AcsParams,
) -> np.ndarray:
    """Static factor of the gateway score; multiplying by the pheromone
    slice reproduces hgw_score for admitted cells."""
    n_channels = model.n_channels
    width = max(max((len(g) for g in members), default=0), 1)
    static = np.zeros((len(members), width, n_channels))
    avail_counts = model.availability.sum(axis=1)
    for i, group in enumerate(members):
        if not group:
            continue
        idx = np.asarray(group)
        conf_counts = model.interference[np.ix_(idx, idx)].sum(axis=1)  # (h, M)
        kappa = _conflict_factor(conf_counts.astype(float), params.interference_mode)
        base = model.reward[idx] / (n_channels * len(group) * model.b_max)
        grid = base * avail_counts[idx][:, None] * kappa
        grid[~model.availability[idx]] = 0.0
        if policy.predicate is not _admit_all:
            for j in range(len(group)):
                for m in range(n_channels):
                    if not policy.admits(i, j, m):
                        grid[j, m] = 0.0
        static[i, : len(group), :] = grid
    return static


def _deposit_grid(
    members: tuple[tuple[int, ...], ...],
    model: SpectrumModel,
    params: AcsParams,
) -> np.ndarray:
    """deposit_amount precomputed per (NAN, gateway, channel) cell."""
    n_channels = model.n_channels
    width = max(max((len(g) for g in members), default=0), 1)
    grid = np.zeros((len(members), width, n_channels))
    for i, group in enumerate(members):
        for j, n in enumerate(group):
            for m in range(n_channels):
                grid[i, j, m] = deposit_amount(n, m, model, params)
    return grid


def _normalized_costs(utilities: Sequence[float]) -> tuple[float, ...]:
    u = np.asarray(utilities, dtype=float)
    u_star, u_min = float(u.max()), float(u.min())
    if u_star == u_min:
        return tuple(0.0 for _ in utilities)
    return tuple(float(c) for c in (u_star - u) / (u_star - u_min))


CONVERGENCE_WINDOW = 10


def _converged_at(best_series: Sequence[float], window: int = CONVERGENCE_WINDOW) -> int:
    """First iteration whose best value survives a confirmation window.

    An iteration counts as the convergence point when the running best does
    not improve during the next ``window`` iterations (or the trace ends
    first)."""
    n = len(best_series)
    for xi in range(1, n + 1):
        hi = min(xi + window, n)
        if all(best_series[k] == best_series[xi - 1] for k in range(xi, hi)):
            return xi
    return n


def allocate(
    model: SpectrumModel,
    nan_of: Sequence[int],
    params: AcsParams,
    policy: AdmissionPolicy | None = None,
) -> AcsResult:
    """Run the full colony and return the assignment plus its trace.

    Each iteration resets the ants; every ant then walks every channel,
    picking a NAN (semi-local deposit follows immediately) and a gateway
    inside it (local deposit), never revisiting a node it already took in
    this iteration. Evaporation closes the iteration, after which the
    running pheromone average is turned into a feasible assignment whose
    sum-reward feeds the trace. Deterministic for a fixed seed.
    """
    if policy is None:
        policy = AdmissionPolicy()
    if len(nan_of) != model.n_users:
        raise ValueError(
            f"nan map covers {len(nan_of)} users, model has {model.n_users}"
        )
    members = group_by_nan(nan_of)
    n_channels = model.n_channels

    if model.b_max <= 0.0 or not model.availability.any():
        zeros = tuple(0.0 for _ in range(params.iterations))
        trace = ConvergenceTrace(
            seed=params.seed, best_utility=zeros, normalized_cost=zeros, converged_at=1
        )
        return AcsResult(Assignment.zeros(model.n_users, n_channels), trace)

    T = PheromoneTensor(members, n_channels)
    static = _selection_grid(members, model, policy, params)
    deposits = _deposit_grid(members, model, params)
    admitted = None
    if policy.predicate is not _admit_all:
        admitted = np.zeros((model.n_users, n_channels), dtype=bool)
        for i, group in enumerate(members):
            for j, n in enumerate(group):
                for m in range(n_channels):
                    admitted[n, m] = policy.admits(i, j, m)
    rng = random.Random(params.seed)

    dry_utilities: list[float] = []
    best_series: list[float] = []
    best = float("-inf")
    for _xi in range(params.iterations):
        ants = [AntState() for _ in range(params.n_ants)]
        for step in range(n_channels):
            for offset, ant in enumerate(ants):
                # Ants start on staggered channels so the visit-once rule does
                # not systematically drain low-index channels first.
                m = (step + offset) % n_channels
                scores = T.current[:, :, m] * static[:, :, m]
                for vi, vj in ant.visited:
                    scores[vi, vj] = 0.0
                nan_mass = scores.sum(axis=1)
                if nan_mass.sum() <= 0.0:
                    continue  # nothing selectable for this ant on this channel
                i_sel = select(nan_mass, params.g_cap, rng)
                T.current[i_sel, :, m] += deposits[i_sel, :, m]
                row = T.current[i_sel, :, m] * static[i_sel, :, m]
                for vi, vj in ant.visited:
                    if vi == i_sel:
                        row[vj] = 0.0
                j_sel = select(row, params.g_prime, rng)
                T.current[i_sel, j_sel, m] += deposits[i_sel, j_sel, m]
                ant.visit(i_sel, j_sel)
                ant.carried_channel = m
        global_evaporation(T, params)
        T.record_iteration()

        dry_run = _assign_from_pheromone(T.iteration_mean(), members, model, admitted)
        u = float(reward_vector(dry_run, model).sum())
        dry_utilities.append(u)
        best = max(best, u)
        best_series.append(best)

    trace = ConvergenceTrace(
        seed=params.seed,
        best_utility=tuple(best_series),
        normalized_cost=_normalized_costs(dry_utilities),
        converged_at=_converged_at(best_series),
    )
    return AcsResult(final_selection(T, model, admitted), trace)
