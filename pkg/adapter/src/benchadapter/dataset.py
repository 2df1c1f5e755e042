"""Loader for the measured-results CSV the replay mode answers from.

Schema: network,framework,compression,input_size,accuracy,time_s,status
Accuracy may be a fraction or a bare/marked percentage; failure rows leave
accuracy and time_s empty.
"""

from __future__ import annotations

import csv
from importlib import resources
from pathlib import Path

COLUMNS = ("network", "framework", "compression", "input_size", "accuracy", "time_s", "status")
OK = "ok"
FAILURES = ("incompatible", "resource_exhausted", "timeout", "protocol_error")


class DatasetError(ValueError):
    pass


def bundled_dataset_path() -> Path:
    return Path(str(resources.files("benchadapter.data").joinpath("segmentation_rpi0.csv")))


def _accuracy(raw: str, line_no: int) -> float:
    text = raw.strip()
    if text.endswith("%"):
        text = text[:-1]
        percent = True
    else:
        percent = False
    try:
        value = float(text)
    except ValueError:
        raise DatasetError(f"line {line_no}: accuracy {raw!r} is not a number") from None
    if percent or value > 1.0:
        value /= 100.0
    if not 0 <= value <= 1:
        raise DatasetError(f"line {line_no}: accuracy {raw!r} out of range")
    return value


def load_dataset(path=None) -> dict:
    """Map (network, framework, compression, input_size) -> result dict."""
    path = Path(path) if path is not None else bundled_dataset_path()
    table = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError(f"{path}: empty file") from None
        if tuple(h.strip() for h in header) != COLUMNS:
            raise DatasetError(f"{path}: unexpected header {header!r}")
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(COLUMNS):
                raise DatasetError(f"line {line_no}: expected {len(COLUMNS)} fields")
            network, framework, compression, size_raw, acc_raw, time_raw, status = (
                cell.strip() for cell in row
            )
            try:
                input_size = int(size_raw)
            except ValueError:
                raise DatasetError(f"line {line_no}: bad input_size {size_raw!r}") from None
            key = (network, framework, compression, input_size)
            if key in table:
                raise DatasetError(f"line {line_no}: duplicate row {key}")
            if status == OK:
                entry = {
                    "status": OK,
                    "accuracy": _accuracy(acc_raw, line_no),
                    "time_s": float(time_raw),
                }
                if entry["time_s"] <= 0:
                    raise DatasetError(f"line {line_no}: time_s must be > 0")
            elif status in FAILURES:
                entry = {"status": status}
            else:
                raise DatasetError(f"line {line_no}: unknown status {status!r}")
            table[key] = entry
    if not table:
        raise DatasetError(f"{path}: no rows")
    return table
