"""Command-line front end: generate, allocate, sweep, converge."""

from __future__ import annotations

import argparse
import json
import sys

from .acs import AcsParams, allocate
from .baselines import (
    AlgorithmKind,
    CapacityError,
    brute_force_optimal,
    csgc_assignment,
    random_assignment,
)
from .harness import (
    DEFAULT_SWEEP_VALUES,
    ScenarioFormatError,
    SweepSpec,
    ant_count_study,
    emit_csv,
    load_scenario,
    run_convergence,
    run_sweep,
    save_scenario,
)
from .topology import ConfigurationError, ScenarioConfig, build_model, generate_scenario
from .utility import UtilityKind, evaluate, is_feasible


def _add_scenario_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--side", type=float, default=10.0, help="side of the square area")
    parser.add_argument("--channels", type=int, default=10, help="number of channels")
    parser.add_argument("--nans", type=int, default=5, help="number of NANs")
    parser.add_argument("--sus-per-nan", type=int, default=20, help="gateways per NAN")
    parser.add_argument("--pus", type=int, default=10, help="number of primary users")
    parser.add_argument("--dmin", type=float, default=1.0, help="minimum transmit range")
    parser.add_argument("--dmax", type=float, default=4.0, help="maximum transmit range")
    parser.add_argument("--dp", type=float, default=2.0, help="primary protection radius")
    parser.add_argument("--seed", type=int, default=0, help="base RNG seed")


def _add_acs_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--ants", type=int, default=15)
    parser.add_argument("--iterations", type=int, default=100)
    parser.add_argument("--rho", type=float, default=0.9, help="evaporation coefficient")
    parser.add_argument("--g", type=float, default=0.9, help="NAN selection gate")
    parser.add_argument("--g-prime", type=float, default=0.9, help="gateway selection gate")
    parser.add_argument("--interference-mode", choices=["penalty", "smoothed", "literal"],
                        default="penalty", help="conflict-count weighting in gateway scores")


def _scenario_config(args: argparse.Namespace) -> ScenarioConfig:
    return ScenarioConfig(
        side=args.side,
        channels=args.channels,
        n_nans=args.nans,
        sus_per_nan=args.sus_per_nan,
        n_pus=args.pus,
        d_min=args.dmin,
        d_max=args.dmax,
        dp=args.dp,
    )


def _acs_params(args: argparse.Namespace) -> AcsParams:
    return AcsParams(
        n_ants=args.ants,
        iterations=args.iterations,
        rho=args.rho,
        g_cap=args.g,
        g_prime=args.g_prime,
        interference_mode=args.interference_mode,
        seed=args.seed,
    )


def _values_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from err


def _cmd_generate(args: argparse.Namespace) -> int:
    scenario = generate_scenario(_scenario_config(args), args.seed)
    save_scenario(scenario, args.out)
    print(f"wrote {args.out}: {scenario.n_users} SUs, {len(scenario.primaries)} PUs, "
          f"{scenario.channels} channels")
    return 0


def _cmd_allocate(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    model = build_model(scenario, args.reward)
    kind = UtilityKind(args.utility)
    algorithm = AlgorithmKind(args.algorithm)

    if algorithm is AlgorithmKind.ACS:
        assignment = allocate(model, scenario.nan_of(), _acs_params(args)).assignment
    elif algorithm is AlgorithmKind.CSGC:
        assignment = csgc_assignment(model, kind)
    elif algorithm is AlgorithmKind.RANDOM:
        assignment = random_assignment(model, args.seed)
    else:
        assignment = brute_force_optimal(model, kind).assignment

    assert is_feasible(assignment, model)
    value = evaluate(assignment, model, kind)
    doc = {
        "algorithm": algorithm.value,
        "utility": kind.value,
        "reward_mode": args.reward,
        "utility_value": value,
        "channel_of": assignment.channel_of(),
        "assignment": assignment.a.tolist(),
    }
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    print(f"{algorithm.value}: {kind.value} = {value}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    values = args.values if args.values is not None else DEFAULT_SWEEP_VALUES[args.variable]
    spec = SweepSpec(
        variable=args.variable,
        values=values,
        fixed=_scenario_config(args),
        algorithms=tuple(AlgorithmKind(tok) for tok in args.algorithms.split(",")),
        utilities=tuple(UtilityKind(tok) for tok in args.utilities.split(",")),
        seeds=args.seeds,
        acs=_acs_params(args),
        base_seed=args.seed,
        reward_mode=args.reward,
    )
    emit_csv(run_sweep(spec), args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_converge(args: argparse.Namespace) -> int:
    cfg = _scenario_config(args)
    acs = _acs_params(args)
    traces = run_convergence(cfg, acs, args.seeds, base_seed=args.seed, reward_mode=args.reward)
    emit_csv(traces, args.out)
    median = sorted(t.converged_at for t in traces)[len(traces) // 2]
    print(f"wrote {args.out}; median converged_at = {median}")
    if args.ant_study:
        costs = ant_count_study(cfg, acs, DEFAULT_SWEEP_VALUES["ants"], args.seeds, args.seed,
                                args.reward)
        for ants, cost in costs.items():
            print(f"ants={ants}: mean final normalized cost = {cost:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cogspectrum",
        description="Cognitive-radio channel assignment simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a random scenario file")
    _add_scenario_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("allocate", help="run one allocator on a scenario file")
    p.add_argument("--scenario", required=True)
    p.add_argument("--algorithm", choices=[a.value for a in AlgorithmKind], default="acs")
    p.add_argument("--utility", choices=[u.value for u in UtilityKind], default="msr")
    p.add_argument("--reward", choices=["coverage", "capacity"], default="coverage")
    _add_acs_args(p)
    p.add_argument("--seed", type=int, default=0, help="allocator RNG seed")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_allocate)

    p = sub.add_parser("sweep", help="sweep a variable and write aggregated CSV")
    p.add_argument("--variable", choices=list(DEFAULT_SWEEP_VALUES), required=True)
    p.add_argument("--values", type=_values_list, default=None,
                   help="comma-separated list; defaults depend on the variable")
    p.add_argument("--seeds", type=int, default=5, help="replicates per value")
    p.add_argument("--algorithms", default="acs,csgc,random")
    p.add_argument("--utilities", default="msr,mmr,mpf")
    p.add_argument("--reward", choices=["coverage", "capacity"], default="coverage")
    _add_scenario_args(p)
    _add_acs_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("converge", help="record per-iteration traces to CSV")
    p.add_argument("--seeds", type=int, default=20, help="number of replicates")
    p.add_argument("--reward", choices=["coverage", "capacity"], default="coverage")
    p.add_argument("--ant-study", action="store_true",
                   help="also compare final cost across the default ant counts")
    _add_scenario_args(p)
    _add_acs_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_converge)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, ScenarioFormatError, CapacityError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
