"""Table-backed evaluator: answers from a CSV of pre-measured results.

CSV schema (header required, UTF-8, comma-separated):

    network,framework,compression,input_size,accuracy,time_s,status

`accuracy` accepts a fraction (0.61), a bare percentage (61, divided by 100
at load), or an explicit percent marker (61%). Failure rows may leave
accuracy and time_s empty. Combinations absent from the table evaluate as
`incompatible` - the table is the whole truth about what runs.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path

from ..space import Combination, Dimension, SearchSpace
from .base import FAILURE_STATUSES, STATUS_OK, Evaluation

ORACLE_COLUMNS = (
    "network",
    "framework",
    "compression",
    "input_size",
    "accuracy",
    "time_s",
    "status",
)


class OracleParseError(ValueError):
    """Malformed oracle CSV; message carries the offending line number."""


@dataclass(frozen=True)
class OracleRow:
    network: str
    framework: str
    compression: str
    input_size: int
    status: str
    accuracy: float | None = None
    time_s: float | None = None

    @property
    def labels(self) -> tuple[str, str, str]:
        return (self.network, self.framework, self.compression)

    @property
    def key(self) -> tuple[str, str, str, int]:
        return (self.network, self.framework, self.compression, self.input_size)


def _parse_accuracy(raw: str, line_no: int) -> float:
    text = raw.strip()
    explicit_percent = text.endswith("%")
    if explicit_percent:
        text = text[:-1].strip()
    try:
        value = float(text)
    except ValueError:
        raise OracleParseError(f"line {line_no}: accuracy {raw!r} is not a number") from None
    if explicit_percent:
        value /= 100.0
    elif value > 1.0:
        if value > 100.0:
            raise OracleParseError(
                f"line {line_no}: accuracy {raw!r} exceeds 100 percent"
            )
        value /= 100.0
        if value < 0.10:
            warnings.warn(
                f"line {line_no}: accuracy {raw} read as {value:.4f} "
                "(bare values > 1 are treated as percentages)",
                stacklevel=3,
            )
    if not 0 <= value <= 1:
        raise OracleParseError(f"line {line_no}: accuracy {raw!r} out of range")
    return value


def parse_oracle_csv(path) -> list[OracleRow]:
    """Read and validate every row of an oracle CSV."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise OracleParseError(f"{path}: no rows") from None
        if tuple(h.strip() for h in header) != ORACLE_COLUMNS:
            raise OracleParseError(
                f"{path}: header must be {','.join(ORACLE_COLUMNS)!r}, "
                f"got {','.join(header)!r}"
            )
        rows: list[OracleRow] = []
        seen: dict[tuple, int] = {}
        for line_no, raw in enumerate(reader, start=2):
            if not raw or all(not cell.strip() for cell in raw):
                continue
            if len(raw) != len(ORACLE_COLUMNS):
                raise OracleParseError(
                    f"line {line_no}: expected {len(ORACLE_COLUMNS)} fields, got {len(raw)}"
                )
            network, framework, compression, size_raw, acc_raw, time_raw, status = (
                cell.strip() for cell in raw
            )
            if not network or not framework or not compression:
                raise OracleParseError(f"line {line_no}: empty combination label")
            try:
                input_size = int(size_raw)
            except ValueError:
                raise OracleParseError(
                    f"line {line_no}: input_size {size_raw!r} is not an integer"
                ) from None
            if input_size <= 0:
                raise OracleParseError(f"line {line_no}: input_size must be positive")
            if status == STATUS_OK:
                if not acc_raw or not time_raw:
                    raise OracleParseError(
                        f"line {line_no}: ok row requires accuracy and time_s"
                    )
                accuracy = _parse_accuracy(acc_raw, line_no)
                try:
                    time_s = float(time_raw)
                except ValueError:
                    raise OracleParseError(
                        f"line {line_no}: time_s {time_raw!r} is not a number"
                    ) from None
                if time_s <= 0:
                    raise OracleParseError(f"line {line_no}: time_s must be > 0")
            elif status in FAILURE_STATUSES:
                if acc_raw or time_raw:
                    raise OracleParseError(
                        f"line {line_no}: failure row must leave accuracy/time_s empty"
                    )
                accuracy = None
                time_s = None
            else:
                raise OracleParseError(f"line {line_no}: unknown status {status!r}")
            row = OracleRow(
                network=network,
                framework=framework,
                compression=compression,
                input_size=input_size,
                status=status,
                accuracy=accuracy,
                time_s=time_s,
            )
            if row.key in seen:
                raise OracleParseError(
                    f"line {line_no}: duplicate combination "
                    f"{row.key} (first seen on line {seen[row.key]})"
                )
            seen[row.key] = line_no
            rows.append(row)
        if not rows:
            raise OracleParseError(f"{path}: no rows")
        return rows


def build_space(rows: list[OracleRow]) -> SearchSpace:
    """Infer the 3-dimensional space from the labels present, in file order."""
    networks: dict[str, None] = {}
    frameworks: dict[str, None] = {}
    compressions: dict[str, None] = {}
    for row in rows:
        networks.setdefault(row.network)
        frameworks.setdefault(row.framework)
        compressions.setdefault(row.compression)
    return SearchSpace(
        (
            Dimension("network", tuple(networks)),
            Dimension("framework", tuple(frameworks)),
            Dimension("compression", tuple(compressions)),
        )
    )


@dataclass(frozen=True)
class OracleDataset:
    rows: tuple[OracleRow, ...]
    input_size: int

    def ok_rows(self) -> list[OracleRow]:
        return [r for r in self.rows if r.status == STATUS_OK]

    def save(self, path) -> None:
        """Write back in canonical form (fractional accuracy)."""
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(ORACLE_COLUMNS)
            for r in self.rows:
                writer.writerow(
                    [
                        r.network,
                        r.framework,
                        r.compression,
                        r.input_size,
                        "" if r.accuracy is None else repr(r.accuracy),
                        "" if r.time_s is None else repr(r.time_s),
                        r.status,
                    ]
                )


def load_oracle(path, input_size: int) -> tuple[OracleDataset, SearchSpace]:
    """Load the rows measured at `input_size` and the space they span."""
    rows = [r for r in parse_oracle_csv(path) if r.input_size == input_size]
    if not rows:
        raise OracleParseError(f"{path}: no rows at input_size {input_size}")
    return OracleDataset(tuple(rows), input_size), build_space(rows)


class TableOracle:
    """Evaluator answering from a loaded dataset. Referentially transparent."""

    def __init__(self, dataset: OracleDataset, space: SearchSpace):
        self.dataset = dataset
        self.space = space
        self._by_labels = {row.labels: row for row in dataset.rows}

    @classmethod
    def from_csv(cls, path, input_size: int) -> "TableOracle":
        dataset, space = load_oracle(path, input_size)
        return cls(dataset, space)

    def evaluate(self, comb: Combination) -> Evaluation:
        try:
            labels = self.space.labels(comb)
        except Exception:
            return Evaluation.failure("incompatible", detail="unknown combination")
        row = self._by_labels.get(labels)
        if row is None:
            return Evaluation.failure("incompatible", detail="not in results table")
        if row.status == STATUS_OK:
            return Evaluation.success(row.accuracy, row.time_s)
        return Evaluation.failure(row.status)
