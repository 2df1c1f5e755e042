"""Evaluator backed by a child process speaking line-delimited JSON.

The child is the side that actually builds, compresses, and times models;
this side only ships requests and polices the wire format. One request is
in flight at a time.

Wire format (one JSON object per line, child stdin/stdout):

    parent -> {"type": "hello", "protocol": 1}
    child  -> {"type": "hello", "protocol": 1, "name": "<adapter name>"}
    parent -> {"type": "eval", "id": 7, "combination": {"network": "...",
               "framework": "...", "compression": "..."}, "input_size": 513}
    child  -> {"type": "result", "id": 7, "status": "ok",
               "accuracy": 0.61, "time_s": 0.39}
            | {"type": "result", "id": 7, "status": "incompatible"
               | "resource_exhausted" | "timeout" | "error",
               "detail": "<string>"}
    parent -> {"type": "shutdown"}      (child exits 0)

Anything malformed coming back is converted to a `protocol_error`
evaluation; it never escapes as a raw exception or a bad Evaluation.
"""

from __future__ import annotations

import json
import queue
import subprocess
import threading
import time
from dataclasses import dataclass

from ..space import Combination, SearchSpace
from .base import Evaluation, EvaluatorError

PROTOCOL_VERSION = 1
_WIRE_FAILURES = {
    "incompatible": "incompatible",
    "resource_exhausted": "resource_exhausted",
    "timeout": "timeout",
    "error": "protocol_error",
}
_EOF = object()


class ProtocolSetupError(EvaluatorError):
    """Child could not be spawned or failed the handshake."""


class EvaluatorDeadError(EvaluatorError):
    """The child exited; no further requests can be served."""


class ExternalEvaluator:
    """Client side of the child-process protocol. One request in flight."""

    def __init__(
        self,
        command: list[str],
        space: SearchSpace | None = None,
        input_size: int = 513,
        timeout_s: float = 60.0,
        strict_handshake: bool = True,
    ):
        self.space = space
        self.input_size = input_size
        self.timeout_s = timeout_s
        self.name = None
        self.handshake_error: str | None = None
        self._next_id = 1
        self._stale_ids: set[int] = set()
        self._dead = False
        self._lines: queue.Queue = queue.Queue()
        try:
            self._proc = subprocess.Popen(
                command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise ProtocolSetupError(f"cannot spawn {command!r}: {exc}") from exc
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()
        self._handshake()
        if self.handshake_error and strict_handshake:
            self.close()
            raise ProtocolSetupError(self.handshake_error)

    @property
    def handshake_ok(self) -> bool:
        return self.handshake_error is None

    @property
    def dead(self) -> bool:
        return self._dead

    def _read_loop(self) -> None:
        try:
            for line in self._proc.stdout:
                self._lines.put(line)
        finally:
            self._lines.put(_EOF)

    def _send(self, message: dict) -> bool:
        try:
            self._proc.stdin.write(json.dumps(message) + "\n")
            self._proc.stdin.flush()
            return True
        except (BrokenPipeError, OSError, ValueError):
            self._dead = True
            return False

    def _next_line(self, timeout: float):
        """One line from the child, None on timeout, _EOF when it exited."""
        try:
            line = self._lines.get(timeout=max(timeout, 0.0))
        except queue.Empty:
            return None
        if line is _EOF:
            self._dead = True
        return line

    def _handshake(self) -> None:
        if not self._send({"type": "hello", "protocol": PROTOCOL_VERSION}):
            self.handshake_error = "child stdin closed before handshake"
            return
        line = self._next_line(self.timeout_s)
        if line is None:
            self.handshake_error = "no handshake reply within timeout"
            return
        if line is _EOF:
            self.handshake_error = "child exited during handshake"
            return
        try:
            reply = json.loads(line)
        except json.JSONDecodeError:
            self.handshake_error = f"handshake reply is not JSON: {line.strip()!r}"
            return
        if not isinstance(reply, dict) or reply.get("type") != "hello":
            self.handshake_error = f"expected hello reply, got {reply!r}"
            return
        if reply.get("protocol") != PROTOCOL_VERSION:
            self.handshake_error = (
                f"protocol mismatch: want {PROTOCOL_VERSION}, got {reply.get('protocol')!r}"
            )
            return
        if not isinstance(reply.get("name"), str) or not reply["name"]:
            self.handshake_error = "hello reply carries no adapter name"
            return
        self.name = reply["name"]

    def request(self, combination: dict, timeout_s: float | None = None) -> Evaluation:
        """Send one eval request with explicit labels and await its reply.

        A non-positive timeout classifies as `timeout` immediately; the
        eventual reply is dropped when it arrives.
        """
        if self._dead:
            raise EvaluatorDeadError("external evaluator child has exited")
        timeout = self.timeout_s if timeout_s is None else timeout_s
        req_id = self._next_id
        self._next_id += 1
        sent = self._send(
            {
                "type": "eval",
                "id": req_id,
                "combination": combination,
                "input_size": self.input_size,
            }
        )
        if not sent:
            return Evaluation.failure("protocol_error", detail="child closed stdin pipe")
        if timeout <= 0:
            self._stale_ids.add(req_id)
            return Evaluation.failure("timeout", detail="timeout elapsed before reply")
        deadline = time.monotonic() + timeout
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                self._stale_ids.add(req_id)
                return Evaluation.failure("timeout", detail="no reply within timeout")
            line = self._next_line(remaining)
            if line is None:
                self._stale_ids.add(req_id)
                return Evaluation.failure("timeout", detail="no reply within timeout")
            if line is _EOF:
                return Evaluation.failure("protocol_error", detail="child exited mid-request")
            evaluation = self._parse_result(line, req_id)
            if evaluation is not None:
                return evaluation
            # stale reply to a timed-out id: keep waiting

    def _parse_result(self, line: str, expected_id: int) -> Evaluation | None:
        text = line.strip()
        try:
            reply = json.loads(text)
        except json.JSONDecodeError:
            return Evaluation.failure("protocol_error", detail=f"reply is not JSON: {text!r}")
        if not isinstance(reply, dict) or reply.get("type") != "result":
            return Evaluation.failure("protocol_error", detail=f"expected result, got {text!r}")
        reply_id = reply.get("id")
        if reply_id in self._stale_ids:
            self._stale_ids.discard(reply_id)
            return None
        if reply_id != expected_id:
            return Evaluation.failure(
                "protocol_error", detail=f"reply id {reply_id!r}, expected {expected_id}"
            )
        status = reply.get("status")
        if status == "ok":
            accuracy = reply.get("accuracy")
            time_s = reply.get("time_s")
            if (
                isinstance(accuracy, (int, float))
                and isinstance(time_s, (int, float))
                and 0 <= accuracy <= 1
                and time_s > 0
            ):
                return Evaluation.success(float(accuracy), float(time_s))
            return Evaluation.failure(
                "protocol_error", detail=f"ok result with bad payload: {text!r}"
            )
        if status in _WIRE_FAILURES:
            detail = reply.get("detail")
            return Evaluation.failure(
                _WIRE_FAILURES[status],
                detail=detail if isinstance(detail, str) else None,
            )
        return Evaluation.failure("protocol_error", detail=f"unknown status {status!r}")

    def evaluate(self, comb: Combination) -> Evaluation:
        if self.space is None:
            raise EvaluatorError("external evaluator has no space bound")
        labels = self.space.labels(comb)
        combination = dict(zip(self.space.names, labels))
        return self.request(combination)

    def close(self) -> int | None:
        """Ask the child to shut down; returns its exit code if it stopped."""
        if self._proc.poll() is None:
            self._send({"type": "shutdown"})
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.terminate()
                try:
                    self._proc.wait(timeout=5)
                except subprocess.TimeoutExpired:
                    self._proc.kill()
                    self._proc.wait()
        self._dead = True
        return self._proc.poll()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def run_protocol_checks(
    command: list[str],
    ok_combination: dict,
    input_size: int = 513,
    timeout_s: float = 10.0,
) -> list[CheckResult]:
    """Conformance run against a child: handshake, a known-good evaluation,
    an unknown combination, forced-timeout handling, recovery, shutdown.

    `ok_combination` maps dimension names to labels the child must answer
    `ok` for. Failures never raise; every rule gets its own verdict.
    """
    results: list[CheckResult] = []
    try:
        ev = ExternalEvaluator(
            command,
            space=None,
            input_size=input_size,
            timeout_s=timeout_s,
            strict_handshake=False,
        )
    except ProtocolSetupError as exc:
        results.append(CheckResult("spawn", False, str(exc)))
        return results
    results.append(CheckResult("spawn", True, "child process started"))
    if ev.handshake_ok:
        results.append(CheckResult("handshake", True, f"adapter name {ev.name!r}"))
    else:
        results.append(CheckResult("handshake", False, ev.handshake_error))

    def _eval(combination: dict, timeout: float | None = None) -> Evaluation | None:
        try:
            return ev.request(combination, timeout_s=timeout)
        except EvaluatorError as exc:
            return Evaluation.failure("protocol_error", detail=str(exc))

    known = _eval(ok_combination)
    if known.ok:
        results.append(
            CheckResult(
                "evaluation",
                True,
                f"accuracy={known.accuracy} time_s={known.time_s}",
            )
        )
    else:
        results.append(
            CheckResult("evaluation", False, f"status={known.status} detail={known.detail}")
        )

    absent = {name: "__protocol-check-absent__" for name in ok_combination}
    unknown = _eval(absent)
    if unknown.status == "incompatible":
        results.append(CheckResult("unknown-combination", True, "reported incompatible"))
    else:
        results.append(
            CheckResult(
                "unknown-combination",
                False,
                f"expected incompatible, got {unknown.status}",
            )
        )

    forced = _eval(ok_combination, timeout=0.0)
    if forced.status == "timeout":
        results.append(CheckResult("timeout-classification", True, "classified as timeout"))
    else:
        results.append(
            CheckResult(
                "timeout-classification",
                False,
                f"expected timeout, got {forced.status}",
            )
        )

    recovered = _eval(ok_combination)
    if recovered.ok:
        results.append(CheckResult("recovery", True, "child still serving after dropped reply"))
    else:
        results.append(
            CheckResult(
                "recovery",
                False,
                f"status={recovered.status} detail={recovered.detail}",
            )
        )

    exit_code = ev.close()
    if exit_code == 0:
        results.append(CheckResult("shutdown", True, "child exited 0"))
    else:
        results.append(CheckResult("shutdown", False, f"exit code {exit_code}"))
    return results
