"""Cross-checks against the parent search process, driven purely through its
command line and the wire protocol: a replay-mode search must be
byte-identical to the parent's own in-process table evaluator, the
conformance checker must pass against this adapter, and the fault-injection
knobs must be flagged."""

import subprocess
import sys

from benchadapter.dataset import bundled_dataset_path

PARENT = [sys.executable, "-m", "combosearch.cli"]
ADAPTER_CMD = f"{sys.executable} -m benchadapter --mode replay"


def run_parent(*argv, timeout=120):
    return subprocess.run(
        [*PARENT, *argv], capture_output=True, text=True, timeout=timeout
    )


def _pass(message):
    print(f"\nPASS: {message}")


def test_replay_search_byte_identical(tmp_path):
    dataset = str(bundled_dataset_path())
    common = [
        "--oracle", dataset,
        "--input-size", "513",
        "--iterations", "50",
        "--seed", "17",
        "--format", "csv",
    ]
    in_process = run_parent(
        "search", *common,
        "--report", str(tmp_path / "inproc.csv"),
        "--out", str(tmp_path / "inproc.json"),
    )
    assert in_process.returncode in (0, 5), in_process.stderr
    through_adapter = run_parent(
        "search", *common,
        "--evaluator", "external",
        "--external-cmd", ADAPTER_CMD,
        "--timeout-s", "30",
        "--report", str(tmp_path / "adapter.csv"),
        "--out", str(tmp_path / "adapter.json"),
    )
    assert through_adapter.returncode in (0, 5), through_adapter.stderr
    assert in_process.stdout == through_adapter.stdout
    assert (tmp_path / "inproc.csv").read_bytes() == (tmp_path / "adapter.csv").read_bytes()
    assert (tmp_path / "inproc.json").read_bytes() == (tmp_path / "adapter.json").read_bytes()
    _pass("replay search byte-identical to the in-process table evaluator (report, run state, stdout)")


def test_conformance_checks_pass():
    result = run_parent(
        "protocol-check",
        "--external-cmd", ADAPTER_CMD,
        "--timeout-s", "30",
    )
    assert result.returncode == 0, result.stdout + result.stderr
    assert result.stdout.count("[PASS]") == 7
    assert "[FAIL]" not in result.stdout
    _pass("parent conformance checker: all checks pass against the adapter")


def test_inject_timeout_flagged():
    result = run_parent(
        "protocol-check",
        "--external-cmd", ADAPTER_CMD + " --inject-timeout",
        "--timeout-s", "2",
    )
    assert result.returncode != 0
    assert "[FAIL] evaluation" in result.stdout
    _pass("fault injection: swallowed request surfaces as a failed evaluation check")


def test_inject_malformed_flagged():
    result = run_parent(
        "protocol-check",
        "--external-cmd", ADAPTER_CMD + " --inject-malformed",
        "--timeout-s", "30",
    )
    assert result.returncode != 0
    assert "[FAIL]" in result.stdout
    _pass("fault injection: garbled reply surfaces as a failed check")
