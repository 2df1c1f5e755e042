"""Command-line interface.

Subcommands: search (run a search), resume (continue a saved run),
validate (check an oracle CSV or space file), protocol-check (conformance
run against an external evaluator child).

Exit codes: 0 success, 2 configuration error, 3 input parse error,
4 evaluator/protocol failure, 5 degenerate termination (the search ran out
of viable combinations).
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
import warnings
from pathlib import Path

from .config import ConfigError, SearchConfig
from .data import bundled_dataset_path
from .evaluators import (
    EvaluatorError,
    ExternalEvaluator,
    LandscapeSpec,
    OracleParseError,
    TableOracle,
    load_oracle,
    parse_oracle_csv,
    synthetic_landscape,
)
from .evaluators.external import run_protocol_checks
from .evaluators.oracle import build_space
from .evaluators.synthetic import LandscapeError
from .results import (
    NoResultError,
    RunStateError,
    best_by_m,
    emit_report,
    format_percent,
    load_run,
    pareto_front,
    save_run,
)
from .run import SearchAbortedError, drive, resume_run, start_run
from .space import SpaceError, load_space

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_EVALUATOR = 4
EXIT_DEGENERATE = 5


def _err(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)


def _add_search_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--space", help="space definition JSON (synthetic/external evaluators)")
    parser.add_argument("--oracle", help="oracle CSV path (default: bundled dataset)")
    parser.add_argument("--input-size", type=int, default=513, help="input image side in pixels")
    parser.add_argument("--iterations", type=int, default=60, help="evaluation budget")
    parser.add_argument("--seed", type=int, default=0, help="RNG seed")
    parser.add_argument("--alpha-mode", choices=["fixed", "median"], default="median")
    parser.add_argument("--alpha", type=float, help="threshold value for --alpha-mode fixed")
    parser.add_argument("--update-policy", choices=["once", "per-pair"], default="per-pair")
    parser.add_argument("--clamp-min", type=float, default=0.1)
    parser.add_argument("--clamp-max", type=float, default=10.0)
    parser.add_argument("--failure-factor", type=float, default=0.4)
    parser.add_argument("--floor", type=float, default=0.05, help="exclusion floor (0 disables)")
    parser.add_argument("--no-cache", action="store_true", help="re-evaluate on redraws")
    parser.add_argument(
        "--evaluator", choices=["oracle", "synthetic", "external"], default="oracle"
    )
    parser.add_argument("--landscape", help="synthetic landscape JSON (evaluator=synthetic)")
    parser.add_argument(
        "--landscape-seed", type=int, default=0, help="terrain seed for the synthetic evaluator"
    )
    parser.add_argument("--external-cmd", help="child command line (evaluator=external)")
    parser.add_argument("--timeout-s", type=float, default=60.0, help="per-request timeout")
    parser.add_argument("--out", help="write the run state JSON here")
    parser.add_argument("--report", help="write the results report here")
    parser.add_argument("--format", choices=["csv", "markdown"], default="markdown")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="combosearch",
        description="Adaptive pairwise-penalizing search over categorical configuration spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_search = sub.add_parser("search", help="run a search")
    _add_search_flags(p_search)
    p_search.set_defaults(func=cmd_search)

    p_resume = sub.add_parser("resume", help="continue a saved run")
    p_resume.add_argument("--run", required=True, help="run state JSON written by search --out")
    p_resume.add_argument("--extend", type=int, default=0, help="extra iterations beyond the budget")
    _add_search_flags(p_resume)
    p_resume.set_defaults(func=cmd_resume)

    p_validate = sub.add_parser("validate", help="validate an oracle CSV or space JSON")
    p_validate.add_argument("--oracle", help="oracle CSV to validate")
    p_validate.add_argument("--space", help="space JSON to validate")
    p_validate.set_defaults(func=cmd_validate)

    p_check = sub.add_parser("protocol-check", help="conformance-check an external evaluator")
    p_check.add_argument("--external-cmd", required=True, help="child command line")
    p_check.add_argument("--oracle", help="oracle CSV the child should know (default: bundled)")
    p_check.add_argument("--input-size", type=int, default=513)
    p_check.add_argument("--timeout-s", type=float, default=10.0)
    p_check.set_defaults(func=cmd_protocol_check)

    return parser


def _build_config(args) -> SearchConfig:
    return SearchConfig(
        iterations=args.iterations,
        alpha_mode=args.alpha_mode,
        alpha_value=args.alpha,
        update_policy=args.update_policy.replace("-", "_"),
        clamp_min=args.clamp_min,
        clamp_max=args.clamp_max,
        failure_factor=args.failure_factor,
        exclusion_floor=args.floor,
        cache_evaluations=not args.no_cache,
        seed=args.seed,
    )


def _check_space_hint(space, space_hint):
    """Resume must see the exact space the run was started with."""
    if space_hint is not None and space != space_hint:
        raise SpaceError("evaluator space does not match the saved run")
    return space_hint or space


def _build_evaluator(args, space_hint=None):
    """Returns (evaluator, space, input_size). Raises typed errors."""
    if args.evaluator == "oracle":
        if args.space:
            raise ConfigError("--space is not used with --evaluator oracle (the CSV defines it)")
        path = args.oracle or bundled_dataset_path()
        dataset, space = load_oracle(path, args.input_size)
        space = _check_space_hint(space, space_hint)
        return TableOracle(dataset, space), space, args.input_size
    if args.evaluator == "synthetic":
        if not args.landscape:
            raise ConfigError("--landscape is required with --evaluator synthetic")
        try:
            data = json.loads(Path(args.landscape).read_text(encoding="utf-8"))
            spec = LandscapeSpec.from_dict(data)
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise LandscapeError(f"{args.landscape}: {exc}") from exc
        space = _check_space_hint(spec.space, space_hint)
        return synthetic_landscape(spec, args.landscape_seed), space, None
    # external
    if not args.external_cmd:
        raise ConfigError("--external-cmd is required with --evaluator external")
    if args.space:
        space = load_space(args.space)
    else:
        path = args.oracle or bundled_dataset_path()
        _, space = load_oracle(path, args.input_size)
    space = _check_space_hint(space, space_hint)
    command = shlex.split(args.external_cmd)
    evaluator = ExternalEvaluator(
        command, space=space, input_size=args.input_size, timeout_s=args.timeout_s
    )
    return evaluator, space, args.input_size


def _print_summary(run) -> None:
    done = run.iterations_done
    budget = run.config.iterations
    print(f"iterations: {done}/{budget} (termination: {run.termination_reason})")
    n_excluded = int(run.state.excluded.sum())
    print(
        f"evaluated: {len(run.table)} distinct combinations, "
        f"excluded: {n_excluded}/{run.space.total}"
    )
    try:
        best = best_by_m(run.table)
    except NoResultError:
        print("best: none (no ok evaluations)")
        return
    print(
        f"best: {' / '.join(best.labels)}  m={best.m:.4f}  "
        f"accuracy={format_percent(best.accuracy)}  time_s={best.time_s!r}"
    )
    front = pareto_front(run.table)
    print(f"pareto front ({len(front)}):")
    for rec in front:
        print(f"  {rec.time_s!r}s  {format_percent(rec.accuracy)}  {' / '.join(rec.labels)}")


def _write_outputs(run, args) -> None:
    if args.out:
        save_run(args.out, run)
    if args.report:
        Path(args.report).write_text(
            emit_report(run.table, run.state, fmt=args.format), encoding="utf-8"
        )


def _finish(run, args, evaluator) -> int:
    if isinstance(evaluator, ExternalEvaluator):
        evaluator.close()
    _write_outputs(run, args)
    _print_summary(run)
    if run.termination_reason in ("degenerate", "exhausted"):
        return EXIT_DEGENERATE
    return EXIT_OK


def cmd_search(args) -> int:
    config = _build_config(args)
    evaluator, space, input_size = _build_evaluator(args)
    run = start_run(space, config, input_size=input_size)
    try:
        drive(run, evaluator)
    except SearchAbortedError as exc:
        if isinstance(evaluator, ExternalEvaluator):
            evaluator.close()
        _err(str(exc))
        return EXIT_EVALUATOR
    return _finish(run, args, evaluator)


def cmd_resume(args) -> int:
    run = load_run(args.run)
    remaining = run.config.iterations - run.iterations_done
    if remaining <= 0 and args.extend == 0:
        raise ConfigError(
            f"run is already complete ({run.iterations_done} iterations); use --extend N"
        )
    # The saved run pins the trajectory; only the evaluator is rebuilt.
    args.input_size = run.table.input_size or args.input_size
    evaluator, _, _ = _build_evaluator(args, space_hint=run.space)
    try:
        resume_run(run, evaluator, extend=args.extend)
    except SearchAbortedError as exc:
        if isinstance(evaluator, ExternalEvaluator):
            evaluator.close()
        _err(str(exc))
        return EXIT_EVALUATOR
    return _finish(run, args, evaluator)


def cmd_validate(args) -> int:
    if bool(args.oracle) == bool(args.space):
        raise ConfigError("validate needs exactly one of --oracle or --space")
    if args.space:
        space = load_space(args.space)
        print(f"{args.space}: valid space")
        for dim in space.dimensions:
            print(f"  {dim.name}: {dim.size} values")
        print(f"combinations: {space.total}")
        return EXIT_OK
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rows = parse_oracle_csv(args.oracle)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    space = build_space(rows)
    print(f"{args.oracle}: valid oracle")
    sizes = " x ".join(
        f"{dim.size} {dim.name}{'s' if dim.size != 1 else ''}" for dim in space.dimensions
    )
    print(f"{sizes} ({space.total} combinations)")
    input_sizes: dict[int, int] = {}
    failures = 0
    for row in rows:
        if row.status == "ok":
            input_sizes[row.input_size] = input_sizes.get(row.input_size, 0) + 1
        else:
            failures += 1
    counts = ", ".join(f"{n} ok rows @{size}" for size, n in input_sizes.items())
    print(counts if counts else "no ok rows")
    if failures:
        print(f"{failures} failure rows")
    return EXIT_OK


def cmd_protocol_check(args) -> int:
    path = args.oracle or bundled_dataset_path()
    dataset, space = load_oracle(path, args.input_size)
    ok_rows = dataset.ok_rows()
    best_row = max(ok_rows, key=lambda r: r.accuracy / r.time_s)
    ok_combination = dict(zip(space.names, best_row.labels))
    command = shlex.split(args.external_cmd)
    results = run_protocol_checks(
        command,
        ok_combination,
        input_size=args.input_size,
        timeout_s=args.timeout_s,
    )
    all_passed = True
    for check in results:
        verdict = "PASS" if check.passed else "FAIL"
        all_passed &= check.passed
        print(f"[{verdict}] {check.name}: {check.detail}")
    print("protocol check: " + ("all checks passed" if all_passed else "FAILED"))
    return EXIT_OK if all_passed else EXIT_EVALUATOR


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        _err(f"configuration: {exc}")
        return EXIT_CONFIG
    except (OracleParseError, SpaceError, LandscapeError, RunStateError, OSError) as exc:
        _err(f"input: {exc}")
        return EXIT_INPUT
    except (EvaluatorError, SearchAbortedError) as exc:
        _err(f"evaluator: {exc}")
        return EXIT_EVALUATOR


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
