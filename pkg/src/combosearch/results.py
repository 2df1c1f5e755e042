"""Results table, Pareto front, report emission, and run persistence.

The table holds one row per distinct combination ever sampled, hit-counted
on redraws. Reports list rows by descending score; the Pareto front is the
set of ok rows not dominated in the (time, accuracy) plane. A whole run
(config, space, sampling state, table, progress) round-trips through a
versioned JSON document so runs can be resumed bit-for-bit.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ConfigError, SearchConfig
from .core import SamplingState
from .evaluators.base import STATUS_OK, Evaluation
from .space import Combination, SearchSpace

FORMAT_VERSION = 1

_RUN_STATE_KEYS = {
    "format_version",
    "config",
    "space",
    "input_size",
    "sampling_state",
    "records",
    "iterations_done",
    "termination_reason",
}
_SAMPLING_KEYS = {"u", "excluded", "observed_m", "rng", "seed", "degenerate"}
_RECORD_KEYS = {
    "labels",
    "iteration_first_seen",
    "status",
    "accuracy",
    "time_s",
    "m",
    "hit_count",
}


class RunStateError(ValueError):
    """Run-state file is corrupt, truncated, or from another format version."""


class NoResultError(LookupError):
    """Asked for a best record but the table has no ok rows."""


@dataclass
class ResultRecord:
    labels: tuple[str, ...]
    flat_index: int
    iteration_first_seen: int
    status: str
    accuracy: float | None = None
    time_s: float | None = None
    m: float | None = None
    hit_count: int = 1

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK


class ResultsTable:
    """Global table of evaluated combinations, keyed by combination."""

    def __init__(self, space: SearchSpace, input_size: int | None = None):
        self.space = space
        self.input_size = input_size
        self._records: dict[int, ResultRecord] = {}

    def __len__(self) -> int:
        return len(self._records)

    def record(self, comb: Combination, evaluation: Evaluation, iteration: int) -> ResultRecord:
        """Insert a new row, or bump hit_count when the combination reappears."""
        flat = self.space.flat_index(comb)
        existing = self._records.get(flat)
        if existing is not None:
            existing.hit_count += 1
            return existing
        if evaluation.ok:
            m = evaluation.accuracy / evaluation.time_s
        else:
            m = None
        rec = ResultRecord(
            labels=self.space.labels(comb),
            flat_index=flat,
            iteration_first_seen=iteration,
            status=evaluation.status,
            accuracy=evaluation.accuracy,
            time_s=evaluation.time_s,
            m=m,
        )
        self._records[flat] = rec
        return rec

    def records(self) -> list[ResultRecord]:
        """All rows in first-seen order."""
        return list(self._records.values())

    def ok_records(self) -> list[ResultRecord]:
        return [r for r in self._records.values() if r.ok]

    def get(self, flat: int) -> ResultRecord | None:
        return self._records.get(flat)

    def total_hits(self) -> int:
        return sum(r.hit_count for r in self._records.values())

    def evaluation_of(self, flat: int) -> Evaluation | None:
        """Rebuild the evaluation a row was recorded from (feeds the redraw cache)."""
        rec = self._records.get(flat)
        if rec is None:
            return None
        if rec.ok:
            return Evaluation.success(rec.accuracy, rec.time_s)
        return Evaluation.failure(rec.status)


def sorted_records(table: ResultsTable) -> list[ResultRecord]:
    """Report order: ok rows by descending m, then failures; ties by flat index."""
    return sorted(
        table.records(),
        key=lambda r: (-(r.m if r.m is not None else float("-inf")), r.flat_index),
    )


def best_by_m(table: ResultsTable) -> ResultRecord:
    """Row with the highest score; ties break to the lowest flat index."""
    ok = table.ok_records()
    if not ok:
        raise NoResultError("table has no ok rows")
    return min(ok, key=lambda r: (-r.m, r.flat_index))


def pareto_front(table: ResultsTable) -> list[ResultRecord]:
    """Ok rows not dominated in (time_s, accuracy): no other ok row is at
    least as fast AND at least as accurate with one strict improvement.
    Exact ties on both axes are all retained. Sorted by ascending time."""
    ok = sorted(table.ok_records(), key=lambda r: (r.time_s, r.flat_index))
    front: list[ResultRecord] = []
    best_acc = float("-inf")
    i = 0
    while i < len(ok):
        j = i
        while j < len(ok) and ok[j].time_s == ok[i].time_s:
            j += 1
        group = ok[i:j]
        group_max = max(r.accuracy for r in group)
        if group_max > best_acc:
            front.extend(r for r in group if r.accuracy == group_max)
            best_acc = group_max
        i = j
    return front


def format_percent(fraction: float) -> str:
    """Percentage with trailing zeros trimmed, at least one decimal:
    0.61 -> '61.0%', 0.5639 -> '56.39%'."""
    text = f"{fraction * 100:.4f}".rstrip("0")
    if text.endswith("."):
        text += "0"
    return text + "%"


def _report_rows(table: ResultsTable, state: SamplingState):
    for rec in sorted_records(table):
        probability = float(state.u[rec.flat_index])
        yield rec, probability


def emit_report(table: ResultsTable, state: SamplingState, fmt: str = "markdown") -> str:
    if fmt == "csv":
        return _emit_csv(table, state)
    if fmt == "markdown":
        return _emit_markdown(table, state)
    raise ValueError(f"unknown report format {fmt!r}")


def _emit_csv(table: ResultsTable, state: SamplingState) -> str:
    import csv as _csv

    buf = io.StringIO()
    writer = _csv.writer(buf, lineterminator="\n")
    names = list(table.space.names)
    writer.writerow(names + ["input_size", "accuracy", "time_s", "status", "m", "hit_count", "probability"])
    size = "" if table.input_size is None else table.input_size
    for rec, probability in _report_rows(table, state):
        writer.writerow(
            list(rec.labels)
            + [
                size,
                "" if rec.accuracy is None else repr(rec.accuracy),
                "" if rec.time_s is None else repr(rec.time_s),
                rec.status,
                "" if rec.m is None else repr(rec.m),
                rec.hit_count,
                repr(probability),
            ]
        )
    return buf.getvalue()


def _emit_markdown(table: ResultsTable, state: SamplingState) -> str:
    lines = []
    if table.input_size is not None:
        lines.append(f"### Input size {table.input_size} x {table.input_size}")
        lines.append("")
    headers = [d.name.capitalize() for d in table.space.dimensions]
    headers += ["Time [s]", "Accuracy", "m", "Hits", "Probability"]
    lines.append("| " + " | ".join(headers) + " |")
    lines.append("|" + "|".join("---" for _ in headers) + "|")
    for rec, probability in _report_rows(table, state):
        cells = list(rec.labels)
        if rec.ok:
            cells += [repr(rec.time_s), format_percent(rec.accuracy), f"{rec.m:.4f}"]
        else:
            cells += ["-", "-", rec.status]
        cells += [str(rec.hit_count), f"{probability:.6f}"]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


@dataclass
class RunState:
    """Everything needed to resume a run deterministically."""

    config: SearchConfig
    space: SearchSpace
    state: SamplingState
    table: ResultsTable
    iterations_done: int
    termination_reason: str | None = None


def _state_to_dict(state: SamplingState) -> dict:
    return {
        "u": [float(x) for x in state.u],
        "excluded": [bool(x) for x in state.excluded],
        "observed_m": list(state.observed_m),
        "rng": state.rng.bit_generator.state,
        "seed": state.seed,
        "degenerate": state.degenerate,
    }


def _state_from_dict(data: dict, space: SearchSpace) -> SamplingState:
    unknown = set(data) - _SAMPLING_KEYS
    if unknown:
        raise RunStateError(f"unknown sampling_state fields: {sorted(unknown)}")
    rng_state = data["rng"]
    bit_generator = rng_state.get("bit_generator")
    if bit_generator != "PCG64":
        raise RunStateError(f"unsupported bit generator {bit_generator!r}")
    rng = np.random.Generator(np.random.PCG64())
    rng.bit_generator.state = rng_state
    u = np.asarray(data["u"], dtype=np.float64)
    excluded = np.asarray(data["excluded"], dtype=bool)
    if u.shape[0] != space.total or excluded.shape[0] != space.total:
        raise RunStateError("sampling vectors do not match the space size")
    return SamplingState(
        space=space,
        u=u,
        excluded=excluded,
        observed_m=[float(x) for x in data["observed_m"]],
        rng=rng,
        seed=int(data["seed"]),
        degenerate=bool(data["degenerate"]),
    )


def _record_to_dict(rec: ResultRecord) -> dict:
    return {
        "labels": list(rec.labels),
        "iteration_first_seen": rec.iteration_first_seen,
        "status": rec.status,
        "accuracy": rec.accuracy,
        "time_s": rec.time_s,
        "m": rec.m,
        "hit_count": rec.hit_count,
    }


def save_run(path, run: RunState) -> None:
    document = {
        "format_version": FORMAT_VERSION,
        "config": run.config.to_dict(),
        "space": run.space.to_dict(),
        "input_size": run.table.input_size,
        "sampling_state": _state_to_dict(run.state),
        "records": [_record_to_dict(r) for r in run.table.records()],
        "iterations_done": run.iterations_done,
        "termination_reason": run.termination_reason,
    }
    Path(path).write_text(json.dumps(document, indent=1) + "\n", encoding="utf-8")


def load_run(path) -> RunState:
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise RunStateError(f"{path}: corrupt run-state file ({exc})") from exc
    if not isinstance(document, dict):
        raise RunStateError(f"{path}: corrupt run-state file (not an object)")
    version = document.get("format_version")
    if version != FORMAT_VERSION:
        raise RunStateError(
            f"{path}: format_version {version!r} not supported (want {FORMAT_VERSION})"
        )
    unknown = set(document) - _RUN_STATE_KEYS
    if unknown:
        raise RunStateError(f"{path}: unknown fields {sorted(unknown)}")
    missing = _RUN_STATE_KEYS - set(document)
    if missing:
        raise RunStateError(f"{path}: missing fields {sorted(missing)}")
    try:
        config = SearchConfig.from_dict(document["config"])
    except ConfigError as exc:
        raise RunStateError(f"{path}: bad config ({exc})") from exc
    space = SearchSpace.from_dict(document["space"])
    state = _state_from_dict(document["sampling_state"], space)
    table = ResultsTable(space, input_size=document["input_size"])
    for rec_data in document["records"]:
        unknown = set(rec_data) - _RECORD_KEYS
        if unknown:
            raise RunStateError(f"{path}: unknown record fields {sorted(unknown)}")
        labels = tuple(rec_data["labels"])
        comb = space.combination_from_labels(labels)
        rec = ResultRecord(
            labels=labels,
            flat_index=space.flat_index(comb),
            iteration_first_seen=int(rec_data["iteration_first_seen"]),
            status=rec_data["status"],
            accuracy=rec_data["accuracy"],
            time_s=rec_data["time_s"],
            m=rec_data["m"],
            hit_count=int(rec_data["hit_count"]),
        )
        table._records[rec.flat_index] = rec
    iterations_done = int(document["iterations_done"])
    if iterations_done > config.iterations:
        raise RunStateError(f"{path}: iterations_done exceeds the configured budget")
    return RunState(
        config=config,
        space=space,
        state=state,
        table=table,
        iterations_done=iterations_done,
        termination_reason=document["termination_reason"],
    )
