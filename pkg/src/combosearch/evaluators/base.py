"""The evaluation contract every evaluator implements.

An evaluator maps a combination to an Evaluation: either an `ok` result
carrying (accuracy, single-frame inference time), or one of the typed
failure statuses. Accuracy is always a fraction in [0, 1] internally.
"""

from __future__ import annotations

from dataclasses import dataclass

STATUS_OK = "ok"
FAILURE_STATUSES = ("incompatible", "resource_exhausted", "timeout", "protocol_error")
STATUSES = (STATUS_OK,) + FAILURE_STATUSES


class EvaluatorError(RuntimeError):
    """An evaluator broke its contract or can no longer serve requests."""


@dataclass(frozen=True)
class Evaluation:
    status: str
    accuracy: float | None = None
    time_s: float | None = None
    detail: str | None = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown evaluation status {self.status!r}")
        if self.status == STATUS_OK:
            if self.accuracy is None or self.time_s is None:
                raise ValueError("ok evaluation requires accuracy and time_s")
            if not 0 <= self.accuracy <= 1:
                raise ValueError(f"accuracy must be in [0, 1], got {self.accuracy}")
            if not self.time_s > 0:
                raise ValueError(f"time_s must be > 0, got {self.time_s}")
        else:
            if self.accuracy is not None or self.time_s is not None:
                raise ValueError(f"{self.status} evaluation must not carry accuracy/time_s")

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK

    @classmethod
    def success(cls, accuracy: float, time_s: float) -> "Evaluation":
        return cls(status=STATUS_OK, accuracy=float(accuracy), time_s=float(time_s))

    @classmethod
    def failure(cls, status: str, detail: str | None = None) -> "Evaluation":
        return cls(status=status, detail=detail)
