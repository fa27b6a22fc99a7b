"""Experiment driver: seeded sweeps, convergence studies, and file I/O."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, replace

import numpy as np

from .acs import AcsParams, ConvergenceTrace, allocate
from .baselines import (
    AlgorithmKind,
    CapacityError,
    brute_force_optimal,
    csgc_assignment,
    random_assignment,
)
from .topology import (
    Point,
    PrimaryUser,
    Scenario,
    ScenarioConfig,
    SecondaryUser,
    build_model,
    generate_scenario,
)
from .utility import Assignment, UtilityKind, evaluate, is_feasible

SWEEP_VARIABLES = ("channels", "primaries", "secondaries", "ants")

# Default sweep ranges for the trend studies; override with explicit values.
DEFAULT_SWEEP_VALUES: dict[str, tuple[int, ...]] = {
    "channels": (2, 4, 6, 8, 10, 12),
    "primaries": (2, 4, 6, 8, 10, 12, 14, 16, 18, 20),
    "secondaries": (5, 10, 15, 20, 25, 30),
    "ants": (1, 5, 15),
}

SWEEP_CSV_HEADER = "variable,value,algorithm,utility,mean,std,min,max,runtime_ms"
TRACE_CSV_HEADER = "seed,iteration,best_utility,normalized_cost"


class ScenarioFormatError(ValueError):
    """Raised for scenario files that do not match the expected schema."""


@dataclass(frozen=True)
class SweepSpec:
    """One trend study: sweep a variable, replicate over a seed ladder.

    Replicate k draws its scenario with seed base_seed + k and hands the
    same seed to the seeded allocators, so every algorithm sees identical
    scenarios and the comparison is paired.
    """

    variable: str
    values: tuple[int, ...]
    fixed: ScenarioConfig
    algorithms: tuple[AlgorithmKind, ...]
    utilities: tuple[UtilityKind, ...]
    seeds: int
    acs: AcsParams
    base_seed: int = 0
    reward_mode: str = "coverage"

    def __post_init__(self) -> None:
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"unknown sweep variable {self.variable!r}")
        if not self.values or any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("values must be nonempty and strictly increasing")
        if self.seeds < 1:
            raise ValueError("seeds must be >= 1")
        if not self.algorithms or not self.utilities:
            raise ValueError("need at least one algorithm and one utility")


@dataclass(frozen=True)
class SweepRow:
    variable: str
    value: int
    algorithm: AlgorithmKind
    utility: UtilityKind
    mean: float
    std: float
    min: float
    max: float
    runtime_ms: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]


def _materialize(spec: SweepSpec, value: int) -> tuple[ScenarioConfig, AcsParams]:
    cfg, acs = spec.fixed, spec.acs
    if spec.variable == "channels":
        cfg = replace(cfg, channels=value)
    elif spec.variable == "primaries":
        cfg = replace(cfg, n_pus=value)
    elif spec.variable == "secondaries":
        cfg = replace(cfg, sus_per_nan=value)
    else:
        acs = replace(acs, n_ants=value)
    return cfg, acs


def _checked(assignment: Assignment, model) -> Assignment:
    assert is_feasible(assignment, model)
    return assignment


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Run every (value, algorithm, utility) cell and aggregate over seeds."""
    rows: list[SweepRow] = []
    for value in spec.values:
        cfg, acs = _materialize(spec, value)
        samples: dict[tuple[AlgorithmKind, UtilityKind], list[float]] = {}
        runtimes: dict[tuple[AlgorithmKind, UtilityKind], list[float]] = {}

        for k in range(spec.seeds):
            seed = spec.base_seed + k
            scenario = generate_scenario(cfg, seed)
            model = build_model(scenario, spec.reward_mode)
            nan_of = scenario.nan_of()
            for algorithm in spec.algorithms:
                if algorithm in (AlgorithmKind.ACS, AlgorithmKind.RANDOM):
                    t0 = time.perf_counter()
                    if algorithm is AlgorithmKind.ACS:
                        assignment = allocate(model, nan_of, replace(acs, seed=seed)).assignment
                    else:
                        assignment = random_assignment(model, seed)
                    elapsed = (time.perf_counter() - t0) * 1e3
                    _checked(assignment, model)
                    for kind in spec.utilities:
                        samples.setdefault((algorithm, kind), []).append(
                            evaluate(assignment, model, kind)
                        )
                        runtimes.setdefault((algorithm, kind), []).append(elapsed)
                else:
                    for kind in spec.utilities:
                        t0 = time.perf_counter()
                        if algorithm is AlgorithmKind.CSGC:
                            assignment = csgc_assignment(model, kind)
                        else:
                            try:
                                assignment = brute_force_optimal(model, kind).assignment
                            except CapacityError as err:
                                raise CapacityError(
                                    f"exact search infeasible at {spec.variable}={value}: {err}"
                                ) from err
                        elapsed = (time.perf_counter() - t0) * 1e3
                        _checked(assignment, model)
                        samples.setdefault((algorithm, kind), []).append(
                            evaluate(assignment, model, kind)
                        )
                        runtimes.setdefault((algorithm, kind), []).append(elapsed)

        for (algorithm, kind), values in samples.items():
            arr = np.asarray(values)
            rows.append(
                SweepRow(
                    variable=spec.variable,
                    value=value,
                    algorithm=algorithm,
                    utility=kind,
                    mean=float(arr.mean()),
                    std=float(arr.std()),
                    min=float(arr.min()),
                    max=float(arr.max()),
                    runtime_ms=float(np.mean(runtimes[(algorithm, kind)])),
                )
            )

    rows.sort(key=lambda r: (r.value, r.algorithm.value, r.utility.value))
    return SweepResult(rows=tuple(rows))


def run_convergence(
    cfg: ScenarioConfig,
    acs: AcsParams,
    seeds: int,
    base_seed: int = 0,
    reward_mode: str = "coverage",
) -> list[ConvergenceTrace]:
    """One allocator trace per replicate; replicate k uses seed base_seed + k
    for both the scenario and the colony."""
    traces = []
    for k in range(seeds):
        seed = base_seed + k
        scenario = generate_scenario(cfg, seed)
        model = build_model(scenario, reward_mode)
        result = allocate(model, scenario.nan_of(), replace(acs, seed=seed))
        traces.append(result.trace)
    return traces


def ant_count_study(
    cfg: ScenarioConfig,
    acs: AcsParams,
    ant_values: tuple[int, ...],
    seeds: int,
    base_seed: int = 0,
    reward_mode: str = "coverage",
) -> dict[int, float]:
    """Mean final cost per ant count, normalized per seed across the counts.

    The cost of a colony size is how far the sum-reward of its returned
    assignment falls from the best size on the same seed: for each seed the
    final sum-rewards of all counts are rescaled together, 0 marking the
    best count and 1 the worst, then averaged over seeds.
    """
    finals: dict[int, list[float]] = {ants: [] for ants in ant_values}
    for ants in ant_values:
        params = replace(acs, n_ants=ants)
        for k in range(seeds):
            seed = base_seed + k
            scenario = generate_scenario(cfg, seed)
            model = build_model(scenario, reward_mode)
            result = allocate(model, scenario.nan_of(), replace(params, seed=seed))
            finals[ants].append(evaluate(result.assignment, model, UtilityKind.MSR))

    costs: dict[int, list[float]] = {ants: [] for ants in ant_values}
    for s in range(seeds):
        column = [finals[ants][s] for ants in ant_values]
        hi, lo = max(column), min(column)
        for ants, final in zip(ant_values, column):
            costs[ants].append(0.0 if hi == lo else (hi - final) / (hi - lo))
    return {ants: float(np.mean(values)) for ants, values in costs.items()}


# --- scenario files -------------------------------------------------------

_SCENARIO_KEYS = {"side", "channels", "d_min", "d_max", "primaries", "secondaries", "seed"}
_PRIMARY_KEYS = {"x", "y", "channel", "dp"}
_SECONDARY_KEYS = {"x", "y", "nan"}


def save_scenario(scenario: Scenario, path: str) -> None:
    doc = {
        "side": scenario.side,
        "channels": scenario.channels,
        "d_min": scenario.d_min,
        "d_max": scenario.d_max,
        "primaries": [
            {"x": pu.position.x, "y": pu.position.y, "channel": pu.channel, "dp": pu.protection_radius}
            for pu in scenario.primaries
        ],
        "secondaries": [
            {"x": su.position.x, "y": su.position.y, "nan": su.nan_id}
            for su in scenario.secondaries
        ],
        "seed": scenario.seed,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _require_keys(obj: dict, expected: set[str], ctx: str) -> None:
    missing = expected - obj.keys()
    if missing:
        raise ScenarioFormatError(f"{ctx}: missing field {sorted(missing)[0]!r}")
    extra = obj.keys() - expected
    if extra:
        raise ScenarioFormatError(f"{ctx}: unknown field {sorted(extra)[0]!r}")


def _as_number(value, ctx: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioFormatError(f"{ctx}: expected a number, got {value!r}")
    return float(value)


def _as_int(value, ctx: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioFormatError(f"{ctx}: expected an integer, got {value!r}")
    return value


def load_scenario(path: str) -> Scenario:
    """Parse a scenario file; schema violations name the offending field."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as err:
            raise ScenarioFormatError(f"{path}: line {err.lineno}: {err.msg}") from err
    if not isinstance(doc, dict):
        raise ScenarioFormatError(f"{path}: top-level value must be an object")
    _require_keys(doc, _SCENARIO_KEYS, path)

    if not isinstance(doc["primaries"], list) or not isinstance(doc["secondaries"], list):
        raise ScenarioFormatError(f"{path}: primaries and secondaries must be arrays")

    primaries = []
    for x, entry in enumerate(doc["primaries"]):
        ctx = f"{path}: primaries[{x}]"
        if not isinstance(entry, dict):
            raise ScenarioFormatError(f"{ctx}: expected an object")
        _require_keys(entry, _PRIMARY_KEYS, ctx)
        primaries.append(
            PrimaryUser(
                id=x,
                position=Point(_as_number(entry["x"], ctx), _as_number(entry["y"], ctx)),
                channel=_as_int(entry["channel"], ctx),
                protection_radius=_as_number(entry["dp"], ctx),
            )
        )
    secondaries = []
    for n, entry in enumerate(doc["secondaries"]):
        ctx = f"{path}: secondaries[{n}]"
        if not isinstance(entry, dict):
            raise ScenarioFormatError(f"{ctx}: expected an object")
        _require_keys(entry, _SECONDARY_KEYS, ctx)
        secondaries.append(
            SecondaryUser(
                id=n,
                nan_id=_as_int(entry["nan"], ctx),
                position=Point(_as_number(entry["x"], ctx), _as_number(entry["y"], ctx)),
            )
        )
    try:
        return Scenario(
            side=_as_number(doc["side"], path),
            channels=_as_int(doc["channels"], path),
            d_min=_as_number(doc["d_min"], path),
            d_max=_as_number(doc["d_max"], path),
            primaries=tuple(primaries),
            secondaries=tuple(secondaries),
            seed=_as_int(doc["seed"], path),
        )
    except ValueError as err:
        raise ScenarioFormatError(f"{path}: {err}") from err


# --- CSV emission ---------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(result: SweepResult | list[ConvergenceTrace], path: str) -> None:
    """Write sweep rows or convergence traces with a fixed header.

    Plain decimal formatting, newline-terminated lines, deterministic bytes
    for identical inputs.
    """
    lines: list[str] = []
    if isinstance(result, SweepResult):
        lines.append(SWEEP_CSV_HEADER)
        for row in result.rows:
            lines.append(
                ",".join(
                    (
                        row.variable,
                        str(row.value),
                        row.algorithm.value,
                        row.utility.value,
                        _fmt(row.mean),
                        _fmt(row.std),
                        _fmt(row.min),
                        _fmt(row.max),
                        _fmt(row.runtime_ms),
                    )
                )
            )
    else:
        lines.append(TRACE_CSV_HEADER)
        for trace in result:
            for xi, best, cost in trace.rows():
                lines.append(f"{trace.seed},{xi},{_fmt(best)},{_fmt(cost)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
