"""Scenario generation and the geometric spectrum model.

Secondary users (home gateways) opportunistically reuse channels that are
licensed to primary users. A gateway's usable coverage radius on a channel
shrinks as it backs off from every primary's protection disc; a channel is
available only where that radius still reaches the minimum feasible
transmit range. Two gateways interfere on a channel when their coverage
discs overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ConfigurationError(ValueError):
    """Raised for scenario parameters that cannot be realized."""


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ConfigurationError(f"non-finite coordinate ({self.x}, {self.y})")

    def distance_to(self, other: "Point") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class PrimaryUser:
    """Licensed user occupying one channel inside a protection disc."""

    id: int
    position: Point
    channel: int
    protection_radius: float


@dataclass(frozen=True)
class SecondaryUser:
    """Unlicensed gateway; ``id`` is the global index, ``nan_id`` its group."""

    id: int
    nan_id: int
    position: Point


@dataclass(frozen=True)
class ScenarioConfig:
    """Knobs for the random scenario generator.

    Defaults reproduce the reference experiment scale: a 10 x 10 area,
    10 channels, 5 neighborhoods of 20 gateways, 10 primaries with a
    protection radius of 2, and transmit range bounded by [1, 4].
    """

    side: float = 10.0
    channels: int = 10
    n_nans: int = 5
    sus_per_nan: int = 20
    n_pus: int = 10
    d_min: float = 1.0
    d_max: float = 4.0
    dp: float = 2.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.side) and self.side > 0):
            raise ConfigurationError(f"side must be positive, got {self.side}")
        if self.channels < 1:
            raise ConfigurationError(f"channels must be >= 1, got {self.channels}")
        if self.n_nans < 1 or self.sus_per_nan < 1:
            raise ConfigurationError("need at least one NAN with one secondary user")
        if self.n_pus < 0:
            raise ConfigurationError(f"n_pus must be >= 0, got {self.n_pus}")
        if not (0 < self.d_min < self.d_max) or not math.isfinite(self.d_max):
            raise ConfigurationError(
                f"require 0 < d_min < d_max, got d_min={self.d_min} d_max={self.d_max}"
            )
        if not (math.isfinite(self.dp) and self.dp > 0):
            raise ConfigurationError(f"dp must be positive, got {self.dp}")


@dataclass(frozen=True)
class Scenario:
    """A concrete placement of primaries and secondaries in a square area."""

    side: float
    channels: int
    d_min: float
    d_max: float
    primaries: tuple[PrimaryUser, ...]
    secondaries: tuple[SecondaryUser, ...]
    seed: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.side) and self.side > 0):
            raise ConfigurationError(f"side must be positive, got {self.side}")
        if self.channels < 1:
            raise ConfigurationError("channels must be >= 1")
        if not (0 < self.d_min < self.d_max):
            raise ConfigurationError("require 0 < d_min < d_max")
        if len(self.secondaries) < 1:
            raise ConfigurationError("scenario needs at least one secondary user")
        for p, pu in enumerate(self.primaries):
            if not (0 <= pu.channel < self.channels):
                raise ConfigurationError(f"primaries[{p}]: channel {pu.channel} out of range")
            if pu.protection_radius <= 0:
                raise ConfigurationError(f"primaries[{p}]: protection radius must be positive")
            self._check_inside(pu.position, f"primaries[{p}]")
        for k, su in enumerate(self.secondaries):
            if su.id != k:
                raise ConfigurationError(f"secondaries[{k}]: ids must be dense 0..N-1")
            if su.nan_id < 0:
                raise ConfigurationError(f"secondaries[{k}]: negative nan id")
            self._check_inside(su.position, f"secondaries[{k}]")

    def _check_inside(self, pt: Point, ctx: str) -> None:
        if not (0 <= pt.x <= self.side and 0 <= pt.y <= self.side):
            raise ConfigurationError(f"{ctx}: position ({pt.x}, {pt.y}) outside area")

    @property
    def n_users(self) -> int:
        return len(self.secondaries)

    @property
    def n_channels(self) -> int:
        return self.channels

    @property
    def n_nans(self) -> int:
        return max(su.nan_id for su in self.secondaries) + 1

    def nan_of(self) -> tuple[int, ...]:
        """Per-user NAN index, ordered by global user id."""
        return tuple(su.nan_id for su in self.secondaries)

    def su_positions(self) -> np.ndarray:
        return np.array([[su.position.x, su.position.y] for su in self.secondaries])

    def pu_positions(self) -> np.ndarray:
        if not self.primaries:
            return np.zeros((0, 2))
        return np.array([[pu.position.x, pu.position.y] for pu in self.primaries])


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SpectrumModel:
    """Derived matrices an allocator consumes.

    ``ds`` holds per (user, channel) coverage radii, ``availability`` the
    binary usability mask, ``interference`` the symmetric per-channel
    conflict tensor, and ``reward`` the per (user, channel) payoff.
    """

    ds: np.ndarray            # (N, M) float
    availability: np.ndarray  # (N, M) bool
    interference: np.ndarray  # (N, N, M) bool
    reward: np.ndarray        # (N, M) float

    def __post_init__(self) -> None:
        ds = _readonly(np.asarray(self.ds, dtype=float))
        avail = _readonly(np.asarray(self.availability, dtype=bool))
        conflicts = _readonly(np.asarray(self.interference, dtype=bool))
        reward = _readonly(np.asarray(self.reward, dtype=float))
        object.__setattr__(self, "ds", ds)
        object.__setattr__(self, "availability", avail)
        object.__setattr__(self, "interference", conflicts)
        object.__setattr__(self, "reward", reward)

        n, m = avail.shape
        if ds.shape != (n, m) or reward.shape != (n, m) or conflicts.shape != (n, n, m):
            raise ConfigurationError("model matrices have inconsistent shapes")
        if not np.array_equal(conflicts, conflicts.transpose(1, 0, 2)):
            raise ConfigurationError("interference tensor must be symmetric in users")
        if conflicts[np.arange(n), np.arange(n), :].any():
            raise ConfigurationError("interference tensor must have a zero diagonal")
        pair_avail = avail[:, None, :] & avail[None, :, :]
        if (conflicts & ~pair_avail).any():
            raise ConfigurationError("interference requires availability on both sides")
        if (reward[~avail] != 0).any():
            raise ConfigurationError("reward must be zero on unavailable channels")
        if (reward < 0).any():
            raise ConfigurationError("reward must be nonnegative")

    @property
    def n_users(self) -> int:
        return self.availability.shape[0]

    @property
    def n_channels(self) -> int:
        return self.availability.shape[1]

    @property
    def b_max(self) -> float:
        return float(self.reward.max()) if self.reward.size else 0.0


def generate_scenario(cfg: ScenarioConfig, seed: int) -> Scenario:
    """Draw a random scenario: uniform i.i.d. positions, uniform PU channels.

    Identical (cfg, seed) pairs give bit-identical scenarios. Secondary
    users are numbered NAN by NAN, so user ``n`` belongs to NAN
    ``n // sus_per_nan``.
    """
    rng = np.random.default_rng(seed)
    pu_xy = rng.uniform(0.0, cfg.side, size=(cfg.n_pus, 2))
    pu_ch = rng.integers(0, cfg.channels, size=cfg.n_pus)
    n_users = cfg.n_nans * cfg.sus_per_nan
    su_xy = rng.uniform(0.0, cfg.side, size=(n_users, 2))

    primaries = tuple(
        PrimaryUser(
            id=x,
            position=Point(float(pu_xy[x, 0]), float(pu_xy[x, 1])),
            channel=int(pu_ch[x]),
            protection_radius=cfg.dp,
        )
        for x in range(cfg.n_pus)
    )
    secondaries = tuple(
        SecondaryUser(
            id=n,
            nan_id=n // cfg.sus_per_nan,
            position=Point(float(su_xy[n, 0]), float(su_xy[n, 1])),
        )
        for n in range(n_users)
    )
    return Scenario(
        side=cfg.side,
        channels=cfg.channels,
        d_min=cfg.d_min,
        d_max=cfg.d_max,
        primaries=primaries,
        secondaries=secondaries,
        seed=seed,
    )


def coverage_radius(scn: Scenario, n: int, m: int) -> float:
    """Largest transmit radius user ``n`` may use on channel ``m``.

    The radius is capped at d_max and backs off to ``distance - dp`` from
    every primary occupying the channel; with no such primary the cap
    applies directly. Negative backoffs clamp to zero, which marks the
    channel unusable because the result falls below d_min.
    """
    su = scn.secondaries[n].position
    radius = scn.d_max
    for pu in scn.primaries:
        if pu.channel == m:
            radius = min(radius, su.distance_to(pu.position) - pu.protection_radius)
    return max(0.0, radius)


def build_model(scn: Scenario, reward_mode: str = "coverage") -> SpectrumModel:
    """Derive coverage radii, availability, interference, and rewards.

    reward_mode "coverage" pays the squared radius; "capacity" pays
    ln(1 + radius^2). Both pay zero on unavailable channels.
    """
    if reward_mode not in ("coverage", "capacity"):
        raise ConfigurationError(f"unknown reward mode {reward_mode!r}")

    n_users, n_channels = scn.n_users, scn.n_channels
    su_xy = scn.su_positions()

    ds = np.full((n_users, n_channels), scn.d_max)
    if scn.primaries:
        pu_xy = scn.pu_positions()
        # (P, N) distances from each primary to each secondary
        dist_pu = np.hypot(
            pu_xy[:, 0:1] - su_xy[None, :, 0], pu_xy[:, 1:2] - su_xy[None, :, 1]
        )
        for x, pu in enumerate(scn.primaries):
            backoff = dist_pu[x] - pu.protection_radius
            ds[:, pu.channel] = np.minimum(ds[:, pu.channel], backoff)
    np.clip(ds, 0.0, None, out=ds)

    avail = ds >= scn.d_min

    dist_su = np.hypot(
        su_xy[:, 0:1] - su_xy[None, :, 0], su_xy[:, 1:2] - su_xy[None, :, 1]
    )
    conflicts = np.zeros((n_users, n_users, n_channels), dtype=bool)
    for m in range(n_channels):
        overlap = dist_su < (ds[:, m][:, None] + ds[:, m][None, :])
        cm = overlap & avail[:, m][:, None] & avail[:, m][None, :]
        np.fill_diagonal(cm, False)
        conflicts[:, :, m] = cm

    if reward_mode == "coverage":
        reward = np.where(avail, ds**2, 0.0)
    else:
        reward = np.where(avail, np.log1p(ds**2), 0.0)

    return SpectrumModel(ds=ds, availability=avail, interference=conflicts, reward=reward)
