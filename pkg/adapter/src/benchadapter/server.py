"""The request/response loop: stdin lines in, protocol replies out."""

from __future__ import annotations

import importlib.util
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .dataset import DatasetError, load_dataset

PROTOCOL_VERSION = 1

# dataset statuses map onto the wire; protocol_error has no wire form
_WIRE_STATUS = {
    "incompatible": "incompatible",
    "resource_exhausted": "resource_exhausted",
    "timeout": "timeout",
    "protocol_error": "error",
}


@dataclass
class AdapterConfig:
    mode: str = "replay"                  # replay | live
    dataset: str | None = None            # replay: CSV path (None = bundled)
    hook: str | None = None               # live: path to a module with benchmark()
    latency_s: float = 0.0                # artificial delay before each reply
    inject_timeout: bool = False          # swallow the next eval request
    inject_malformed: bool = False        # garble the next reply

    def __post_init__(self):
        if self.mode not in ("replay", "live"):
            raise ValueError(f"mode must be replay or live, got {self.mode!r}")
        if self.mode == "live" and not self.hook:
            raise ValueError("live mode requires --hook")


def load_hook(path: str):
    """Import `benchmark(combination, input_size) -> (accuracy, time_s)`."""
    spec = importlib.util.spec_from_file_location("benchadapter_hook", Path(path))
    if spec is None or spec.loader is None:
        raise ValueError(f"cannot import hook module {path!r}")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    benchmark = getattr(module, "benchmark", None)
    if not callable(benchmark):
        raise ValueError(f"hook module {path!r} does not define benchmark()")
    return benchmark


class Adapter:
    def __init__(self, config: AdapterConfig):
        self.config = config
        self._skip_next = config.inject_timeout
        self._garble_next = config.inject_malformed
        if config.mode == "replay":
            self._table = load_dataset(config.dataset)
            self._benchmark = None
        else:
            self._table = None
            self._benchmark = load_hook(config.hook)

    # -- outgoing ---------------------------------------------------------

    def _send_line(self, text: str, out) -> None:
        if self.config.latency_s > 0:
            time.sleep(self.config.latency_s)
        out.write(text + "\n")
        out.flush()

    def _send(self, message: dict, out) -> None:
        self._send_line(json.dumps(message), out)

    def _respond(self, req_id, payload: dict, out) -> None:
        if self._garble_next:
            self._garble_next = False
            self._send_line('{"type":"result","id":', out)  # deliberately truncated
            return
        self._send({"type": "result", "id": req_id, **payload}, out)

    # -- request handling ---------------------------------------------------

    def _answer(self, combination: dict, input_size: int) -> dict:
        if self.config.mode == "replay":
            key = (
                combination.get("network"),
                combination.get("framework"),
                combination.get("compression"),
                input_size,
            )
            entry = self._table.get(key)
            if entry is None:
                return {"status": "incompatible", "detail": "not in results table"}
            if entry["status"] == "ok":
                return {
                    "status": "ok",
                    "accuracy": entry["accuracy"],
                    "time_s": entry["time_s"],
                }
            return {"status": _WIRE_STATUS[entry["status"]], "detail": "recorded failure"}
        # live mode
        try:
            accuracy, time_s = self._benchmark(dict(combination), input_size)
        except Exception as exc:
            return {"status": "error", "detail": f"hook raised: {exc}"}
        if not isinstance(accuracy, (int, float)) or not isinstance(time_s, (int, float)):
            return {"status": "error", "detail": "hook returned non-numeric results"}
        if not 0 <= accuracy <= 1 or not time_s > 0:
            return {
                "status": "error",
                "detail": f"hook broke its contract: accuracy={accuracy} time_s={time_s}",
            }
        return {"status": "ok", "accuracy": float(accuracy), "time_s": float(time_s)}

    def handle_line(self, line: str, out) -> bool:
        """Process one request line. Returns False when the loop should stop."""
        text = line.strip()
        if not text:
            return True
        try:
            message = json.loads(text)
        except json.JSONDecodeError:
            self._respond(0, {"status": "error", "detail": "malformed request line"}, out)
            return True
        if not isinstance(message, dict):
            self._respond(0, {"status": "error", "detail": "request is not an object"}, out)
            return True
        kind = message.get("type")
        if kind == "hello":
            self._send(
                {
                    "type": "hello",
                    "protocol": PROTOCOL_VERSION,
                    "name": f"benchadapter/{self.config.mode}",
                },
                out,
            )
            return True
        if kind == "shutdown":
            return False
        req_id = message.get("id")
        if not isinstance(req_id, int):
            req_id = 0
        if kind != "eval":
            self._respond(req_id, {"status": "error", "detail": f"unknown type {kind!r}"}, out)
            return True
        if self._skip_next:
            self._skip_next = False
            return True  # deliberately leave the request unanswered
        combination = message.get("combination")
        if not isinstance(combination, dict):
            self._respond(req_id, {"status": "error", "detail": "combination must be an object"}, out)
            return True
        try:
            input_size = int(message.get("input_size"))
        except (TypeError, ValueError):
            self._respond(req_id, {"status": "error", "detail": "bad input_size"}, out)
            return True
        self._respond(req_id, self._answer(combination, input_size), out)
        return True


def serve(config: AdapterConfig, stdin=None, stdout=None) -> int:
    """Run the loop until shutdown or EOF. Returns the process exit code."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    try:
        adapter = Adapter(config)
    except (DatasetError, ValueError, OSError) as exc:
        print(f"benchadapter: {exc}", file=sys.stderr)
        return 2
    for line in stdin:
        if not adapter.handle_line(line, stdout):
            break
    return 0
