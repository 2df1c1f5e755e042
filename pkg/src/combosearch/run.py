"""The search driver: ties state, evaluator, and results table together."""

from __future__ import annotations

from dataclasses import replace

from .config import SearchConfig
from .core import (
    SamplingState,
    SearchExhaustedError,
    init_state,
    pair_checker,
    record_failure,
    sample,
    score,
)
from .evaluators.base import Evaluation, EvaluatorError
from .results import ResultsTable, RunState
from .space import SearchSpace


class SearchAbortedError(RuntimeError):
    """The evaluator broke down mid-run; carries the failing iteration."""

    def __init__(self, iteration: int, labels: tuple, cause: Exception):
        super().__init__(
            f"evaluator failed at iteration {iteration} on combination "
            f"{'/'.join(labels)}: {cause}"
        )
        self.iteration = iteration
        self.labels = labels


def start_run(space: SearchSpace, config: SearchConfig, input_size: int | None = None) -> RunState:
    return RunState(
        config=config,
        space=space,
        state=init_state(space, config),
        table=ResultsTable(space, input_size=input_size),
        iterations_done=0,
    )


def drive(run: RunState, evaluator) -> RunState:
    """Run iterations until the budget is spent or sampling is exhausted.

    Each iteration: draw, evaluate (through the redraw cache when enabled;
    a cached redraw still consumes an iteration and still re-applies its
    evidence), record, then reweight via the pair update or the failure
    penalty. Deterministic given (seed, config, space, evaluator).
    """
    config = run.config
    state = run.state
    run.termination_reason = None
    cache: dict[int, Evaluation] = {}
    if config.cache_evaluations:
        for rec in run.table.records():
            cache[rec.flat_index] = run.table.evaluation_of(rec.flat_index)
    for iteration in range(run.iterations_done, config.iterations):
        try:
            comb = sample(state)
        except SearchExhaustedError:
            run.iterations_done = iteration
            run.termination_reason = "exhausted"
            return run
        flat = run.space.flat_index(comb)
        if config.cache_evaluations and flat in cache:
            evaluation = cache[flat]
        else:
            try:
                evaluation = evaluator.evaluate(comb)
            except EvaluatorError as exc:
                run.iterations_done = iteration
                raise SearchAbortedError(iteration, run.space.labels(comb), exc) from exc
            if config.cache_evaluations:
                cache[flat] = evaluation
        run.table.record(comb, evaluation, iteration=iteration)
        if evaluation.ok:
            pair_checker(state, comb, score(evaluation.accuracy, evaluation.time_s), config)
        else:
            record_failure(state, comb, config)
        run.iterations_done = iteration + 1
    run.termination_reason = "degenerate" if state.degenerate else "completed"
    return run


def run_search(
    space: SearchSpace,
    evaluator,
    config: SearchConfig,
    input_size: int | None = None,
) -> tuple[ResultsTable, SamplingState]:
    """Fresh search over `space`: returns the results table and final state."""
    run = drive(start_run(space, config, input_size=input_size), evaluator)
    return run.table, run.state


def resume_run(run: RunState, evaluator, extend: int = 0) -> RunState:
    """Continue a loaded run for its remaining budget, optionally extended.

    Resuming an interrupted run yields the same trajectory as an
    uninterrupted one: the redraw cache is rebuilt from the table, and the
    RNG continues from its saved position.
    """
    if extend < 0:
        raise ValueError("extend must be >= 0")
    if extend:
        run.config = replace(run.config, iterations=run.config.iterations + extend)
    return drive(run, evaluator)
